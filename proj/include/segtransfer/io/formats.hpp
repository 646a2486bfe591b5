#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "segtransfer/raster.hpp"
#include "segtransfer/segments.hpp"

namespace segtransfer::io {

// --- label rasters: 8-bit single-channel PNG (class id = pixel value,
// 255 = ignore) ---------------------------------------------------------

void write_label_png(const std::filesystem::path& path, const LabelMask& mask);

// num_classes comes from the manifest; values are validated against it.
LabelMask read_label_png(const std::filesystem::path& path, int num_classes);

// --- probability rasters: "PRB1" ----------------------------------------
// magic "PRB1" (4 bytes), little-endian u32 height, width, C, then
// height*width*C float32 row-major with the class index fastest. File size
// is exactly 16 + 4*H*W*C bytes.

void write_prb1(const std::filesystem::path& path, const ProbMap& prob);
ProbMap read_prb1(const std::filesystem::path& path);

// --- dataset manifest ----------------------------------------------------

struct ManifestEntry {
    std::string sample_id;
    std::string gt;
    std::string pred_real;
    std::string pred_syn;
    std::optional<std::string> prob_real;
    std::optional<std::string> prob_syn;
};

struct DatasetManifest {
    int version = 1;
    int num_classes = 0;
    std::vector<std::string> class_names;
    int ignore_label = 255;
    std::vector<ManifestEntry> samples;

    static DatasetManifest load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::string class_name(int cls) const {
        if (cls >= 0 && cls < static_cast<int>(class_names.size()))
            return class_names[cls];
        return "class_" + std::to_string(cls);
    }
};

// Loads every raster referenced by the manifest and validates dimensions,
// value ranges and argmax consistency. Paths are resolved relative to the
// manifest's directory.
std::vector<PairedSample> load_dataset(const std::filesystem::path& manifest_path,
                                       std::size_t threads = 1);

// --- segment record tables -----------------------------------------------
// CSV, one row per segment: image_id, segment_index, domain, pred_class,
// segment_iou, is_error, then the 35 registry features in order.

void write_segment_csv(const std::filesystem::path& path,
                       std::span<const SegmentRecord> records);
std::vector<SegmentRecord> read_segment_csv(const std::filesystem::path& path);

}  // namespace segtransfer::io
