#include <png.h>

#include <cstdio>
#include <memory>

#include "segtransfer/io/formats.hpp"

namespace segtransfer::io {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_label_png(const std::filesystem::path& path,
                     const LabelMask& mask) {
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file)
        raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        raise(ErrorCode::Io, "libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        raise(ErrorCode::Io, "libpng failed writing " + path.string());
    }
    png_init_io(png, file.get());
    // fixed settings keep the output byte-identical across runs
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, mask.width(), mask.height(), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const std::uint8_t* data = mask.data().data();
    for (int y = 0; y < mask.height(); ++y)
        png_write_row(png, const_cast<png_bytep>(data + static_cast<std::size_t>(y) * mask.width()));
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
}

LabelMask read_label_png(const std::filesystem::path& path, int num_classes) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file)
        raise(ErrorCode::MissingFile, "cannot open " + path.string());

    png_byte header[8] = {};
    if (std::fread(header, 1, 8, file.get()) != 8 ||
        png_sig_cmp(header, 0, 8) != 0)
        raise(ErrorCode::CorruptFile, path.string() + " is not a PNG file");

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(ErrorCode::Io, "libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(ErrorCode::CorruptFile, "libpng failed reading " + path.string());
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    if (color_type != PNG_COLOR_TYPE_GRAY || bit_depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(ErrorCode::CorruptFile,
              path.string() + " must be an 8-bit single-channel PNG");
    }

    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
    for (png_uint_32 y = 0; y < height; ++y)
        png_read_row(png, data.data() + static_cast<std::size_t>(y) * width,
                     nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    LabelMask mask(static_cast<int>(width), static_cast<int>(height),
                   num_classes, std::move(data));
    mask.validate();
    return mask;
}

}  // namespace segtransfer::io
