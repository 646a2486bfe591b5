#include <bit>
#include <cstring>
#include <fstream>

#include "segtransfer/io/formats.hpp"

namespace segtransfer::io {

namespace {

constexpr char kMagic[4] = {'P', 'R', 'B', '1'};

static_assert(std::endian::native == std::endian::little,
              "PRB1 IO assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(const char* p) {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return v;
}

}  // namespace

void write_prb1(const std::filesystem::path& path, const ProbMap& prob) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(kMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(prob.height()));
    put_u32(out, static_cast<std::uint32_t>(prob.width()));
    put_u32(out, static_cast<std::uint32_t>(prob.num_classes()));
    const auto data = prob.data();
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!out) raise(ErrorCode::Io, "failed writing " + path.string());
}

ProbMap read_prb1(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in)
        raise(ErrorCode::MissingFile, "cannot open " + path.string());
    const std::streamoff size = in.tellg();
    in.seekg(0);

    char header[16];
    if (size < 16 || !in.read(header, 16))
        raise(ErrorCode::CorruptFile, path.string() + ": truncated header");
    if (std::memcmp(header, kMagic, 4) != 0)
        raise(ErrorCode::CorruptFile, path.string() + ": bad PRB1 magic");

    const std::uint32_t height = get_u32(header + 4);
    const std::uint32_t width = get_u32(header + 8);
    const std::uint32_t num_classes = get_u32(header + 12);
    if (height == 0 || width == 0 || num_classes == 0 || num_classes > 254)
        raise(ErrorCode::CorruptFile, path.string() + ": bad PRB1 dimensions");

    const std::uint64_t count =
        static_cast<std::uint64_t>(height) * width * num_classes;
    const std::uint64_t expected = 16 + 4 * count;
    if (static_cast<std::uint64_t>(size) != expected)
        raise(ErrorCode::CorruptFile,
              path.string() + ": size " + std::to_string(size) +
                  " does not match expected " + std::to_string(expected));

    std::vector<float> data(count);
    if (!in.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(count * sizeof(float))))
        raise(ErrorCode::CorruptFile, path.string() + ": truncated payload");

    ProbMap prob(static_cast<int>(width), static_cast<int>(height),
                 static_cast<int>(num_classes), std::move(data));
    prob.validate();
    return prob;
}

}  // namespace segtransfer::io
