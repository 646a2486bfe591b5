#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segtransfer/raster.hpp"

namespace segtransfer {

enum class DomainTag : std::uint8_t { Real, Synthetic };

const char* domain_name(DomainTag tag);
DomainTag domain_from_name(std::string_view name);

// One predicted connected component. Pixels are linear indices in row-major
// scan order; boundary/inner are filled by split_boundary_inner and
// partition the pixel list.
struct Segment {
    int cls = 0;
    std::vector<std::uint32_t> pixels;
    std::vector<std::uint32_t> boundary;
    std::vector<std::uint32_t> inner;
};

// The fixed, versioned 35-feature registry. Order matters: it is the CSV
// column order and the rule conditions reference features by these names.
//
//   [0..17]  {entropy, margin, varratio} x {mean, var} x {whole, bd, in}
//   [18..23] predicted-class probability x {mean, var} x {whole, bd, in}
//   [24..26] sizes: whole, inner, boundary
//   [27..28] size ratios: S/S_bd, S_in/S_bd
//   [29..34] mean dispersions rescaled by the size ratios
class FeatureRegistry {
public:
    static constexpr int kCount = 35;
    static const char* version();  // bump when the order or contents change
    static std::span<const std::string_view> names();
    static std::string_view name(int index);
    // Throws Registry for an unknown name.
    static int index_of(std::string_view name);
};

using FeatureVector = std::array<double, FeatureRegistry::kCount>;

struct SegmentRecord {
    std::string image_id;
    int segment_index = 0;
    DomainTag domain = DomainTag::Real;
    int cls = 0;
    FeatureVector features{};
    double segment_iou = 0.0;
    bool is_error = false;  // segment_iou == 0
};

// Maximal 8-connected same-class regions in scan order of their first
// pixel. Ignore-labeled pixels form no segments.
std::vector<Segment> connected_components(const LabelMask& mask);

// boundary = segment pixels with at least one 4-neighbor outside the
// segment or outside the image; inner = the rest.
void split_boundary_inner(Segment& seg, const LabelMask& mask);

struct Dispersion {
    double entropy = 0.0;
    double margin = 0.0;
    double variation_ratio = 0.0;
};

// Normalized dispersion triple of one probability vector (C >= 2):
// entropy in [0,1] (base-C), margin = 1 - (p1 - p2), varratio = 1 - p1.
Dispersion pixel_dispersions(std::span<const double> p);

// Per-pixel dispersion planes for a whole image, computed through the
// dispatched kernels once and then aggregated per segment.
struct DispersionPlanes {
    std::vector<float> entropy, margin, varratio;
};
DispersionPlanes compute_dispersion_planes(const ProbMap& prob);

FeatureVector segment_features(const Segment& seg, const ProbMap& prob,
                               const DispersionPlanes& planes);
FeatureVector segment_features(const Segment& seg, const ProbMap& prob);

enum class SegmentIouMode {
    // |seg ∩ Y_c| / |seg ∪ Y_c*| with Y_c* the union of ground-truth
    // components of class c that intersect the segment.
    Adjusted,
    // |seg ∩ Y_c| / |seg ∪ Y_c| against the full ground-truth class.
    FullClass,
};

// Precomputed ground-truth component structure for one image, reused across
// segments of the same image.
struct GtComponents {
    std::vector<std::int32_t> component_of;  // -1 for ignore pixels
    std::vector<std::int64_t> component_size;
    std::vector<int> component_class;
    std::vector<std::int64_t> class_pixel_count;  // |Y_c| per class

    static GtComponents build(const LabelMask& gt);
};

double segment_iou(const Segment& seg, const LabelMask& gt,
                   SegmentIouMode mode = SegmentIouMode::Adjusted);
double segment_iou(const Segment& seg, const GtComponents& gtc,
                   SegmentIouMode mode = SegmentIouMode::Adjusted);

struct SegmentExtractOptions {
    SegmentIouMode iou_mode = SegmentIouMode::Adjusted;
};

// All records for one prediction channel of one sample. Throws
// MissingProbabilities when prob is absent.
std::vector<SegmentRecord> extract_records(
    const std::string& image_id, DomainTag domain, const LabelMask& pred,
    const std::optional<ProbMap>& prob, const LabelMask& gt,
    const SegmentExtractOptions& opts = {});

}  // namespace segtransfer
