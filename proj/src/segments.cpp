#include "segtransfer/segments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "segtransfer/simd/kernels.hpp"

namespace segtransfer {

const char* domain_name(DomainTag tag) {
    return tag == DomainTag::Real ? "real" : "synthetic";
}

DomainTag domain_from_name(std::string_view name) {
    if (name == "real") return DomainTag::Real;
    if (name == "synthetic") return DomainTag::Synthetic;
    raise(ErrorCode::Domain, "unknown domain tag: " + std::string(name));
}

namespace {

constexpr std::string_view kFeatureNames[FeatureRegistry::kCount] = {
    "entropy_mean",    "entropy_var",    "entropy_bd_mean",
    "entropy_bd_var",  "entropy_in_mean", "entropy_in_var",
    "margin_mean",     "margin_var",     "margin_bd_mean",
    "margin_bd_var",   "margin_in_mean", "margin_in_var",
    "varratio_mean",   "varratio_var",   "varratio_bd_mean",
    "varratio_bd_var", "varratio_in_mean", "varratio_in_var",
    "classprob_mean",  "classprob_var",  "classprob_bd_mean",
    "classprob_bd_var", "classprob_in_mean", "classprob_in_var",
    "size",            "size_in",        "size_bd",
    "size_rel",        "size_in_rel",
    "entropy_rel",     "entropy_in_rel",
    "margin_rel",      "margin_in_rel",
    "varratio_rel",    "varratio_in_rel",
};

// Indices into the registry, kept in sync with kFeatureNames.
enum FeatureIndex : int {
    kEntropyMean = 0,
    kMarginMean = 6,
    kVarratioMean = 12,
    kClassprobMean = 18,
    kSize = 24,
    kSizeIn = 25,
    kSizeBd = 26,
    kSizeRel = 27,
    kSizeInRel = 28,
    kEntropyRel = 29,
    kEntropyInRel = 30,
    kMarginRel = 31,
    kMarginInRel = 32,
    kVarratioRel = 33,
    kVarratioInRel = 34,
};

// Union-find over linear pixel indices (path halving + union by size).
class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

}  // namespace

const char* FeatureRegistry::version() { return "v1"; }

std::span<const std::string_view> FeatureRegistry::names() {
    return {kFeatureNames, static_cast<std::size_t>(kCount)};
}

std::string_view FeatureRegistry::name(int index) {
    if (index < 0 || index >= kCount)
        raise(ErrorCode::Registry,
              "feature index " + std::to_string(index) + " out of range");
    return kFeatureNames[index];
}

int FeatureRegistry::index_of(std::string_view name) {
    for (int i = 0; i < kCount; ++i)
        if (kFeatureNames[i] == name) return i;
    raise(ErrorCode::Registry, "unknown feature name: " + std::string(name));
}

std::vector<Segment> connected_components(const LabelMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    const auto data = mask.data();
    const std::size_t n = data.size();
    DisjointSet ds(n);

    // union with the already-visited half of the 8-neighborhood
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint32_t i = static_cast<std::uint32_t>(y) * w + x;
            const std::uint8_t v = data[i];
            if (v == kIgnoreLabel) continue;
            if (x > 0 && data[i - 1] == v) ds.unite(i, i - 1);
            if (y > 0) {
                const std::uint32_t up = i - w;
                if (data[up] == v) ds.unite(i, up);
                if (x > 0 && data[up - 1] == v) ds.unite(i, up - 1);
                if (x + 1 < w && data[up + 1] == v) ds.unite(i, up + 1);
            }
        }
    }

    // segments ordered by first pixel in scan order
    std::vector<std::int32_t> segment_of_root(n, -1);
    std::vector<Segment> segments;
    for (std::size_t i = 0; i < n; ++i) {
        if (data[i] == kIgnoreLabel) continue;
        const std::uint32_t root = ds.find(static_cast<std::uint32_t>(i));
        std::int32_t si = segment_of_root[root];
        if (si < 0) {
            si = static_cast<std::int32_t>(segments.size());
            segment_of_root[root] = si;
            segments.push_back(Segment{data[i], {}, {}, {}});
        }
        segments[si].pixels.push_back(static_cast<std::uint32_t>(i));
    }
    return segments;
}

void split_boundary_inner(Segment& seg, const LabelMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    const auto data = mask.data();
    seg.boundary.clear();
    seg.inner.clear();
    for (std::uint32_t p : seg.pixels) {
        const int x = static_cast<int>(p % w);
        const int y = static_cast<int>(p / w);
        // a 4-neighbor outside the image or with a different label leaves
        // the segment (same-label 4-neighbors are same-segment under
        // 8-connectivity)
        const std::uint8_t v = data[p];
        const bool bd = (x == 0 || data[p - 1] != v) ||
                        (x + 1 >= w || data[p + 1] != v) ||
                        (y == 0 || data[p - w] != v) ||
                        (y + 1 >= h || data[p + w] != v);
        (bd ? seg.boundary : seg.inner).push_back(p);
    }
}

Dispersion pixel_dispersions(std::span<const double> p) {
    const std::size_t c = p.size();
    if (c < 2)
        raise(ErrorCode::Domain, "dispersions need at least two classes");
    double max1 = p[0];
    double max2 = -std::numeric_limits<double>::infinity();
    double plogp = p[0] > 0.0 ? p[0] * std::log(p[0]) : 0.0;
    for (std::size_t k = 1; k < c; ++k) {
        if (p[k] > max1) {
            max2 = max1;
            max1 = p[k];
        } else if (p[k] > max2) {
            max2 = p[k];
        }
        if (p[k] > 0.0) plogp += p[k] * std::log(p[k]);
    }
    Dispersion d;
    d.entropy = -plogp / std::log(static_cast<double>(c));
    d.margin = 1.0 - (max1 - max2);
    d.variation_ratio = 1.0 - max1;
    return d;
}

DispersionPlanes compute_dispersion_planes(const ProbMap& prob) {
    DispersionPlanes planes;
    const std::size_t n = prob.pixel_count();
    planes.entropy.resize(n);
    planes.margin.resize(n);
    planes.varratio.resize(n);
    simd::dispersion_rows(prob.data().data(), n, prob.num_classes(),
                          planes.entropy.data(), planes.margin.data(),
                          planes.varratio.data());
    return planes;
}

namespace {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;  // population variance; 0 for empty or single pixel
};

// Welford over the plane values of the region's pixels.
MeanVar region_stats(std::span<const std::uint32_t> region,
                     const float* plane) {
    MeanVar mv;
    if (region.empty()) return mv;  // empty-region rule: all zeros
    double mean = 0.0, m2 = 0.0;
    std::int64_t count = 0;
    for (std::uint32_t p : region) {
        ++count;
        const double v = plane[p];
        const double d = v - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (v - mean);
    }
    mv.mean = mean;
    mv.var = m2 / static_cast<double>(count);
    return mv;
}

MeanVar class_prob_stats(std::span<const std::uint32_t> region,
                         const ProbMap& prob, int cls) {
    MeanVar mv;
    if (region.empty()) return mv;
    double mean = 0.0, m2 = 0.0;
    std::int64_t count = 0;
    for (std::uint32_t p : region) {
        ++count;
        const double v = prob.row(p)[cls];
        const double d = v - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (v - mean);
    }
    mv.mean = mean;
    mv.var = m2 / static_cast<double>(count);
    return mv;
}

}  // namespace

FeatureVector segment_features(const Segment& seg, const ProbMap& prob,
                               const DispersionPlanes& planes) {
    if (seg.pixels.empty())
        raise(ErrorCode::Domain, "segment without pixels");
    if (seg.boundary.size() + seg.inner.size() != seg.pixels.size())
        raise(ErrorCode::Domain,
              "segment boundary/inner not computed before feature extraction");
    if (planes.entropy.size() != prob.pixel_count())
        raise(ErrorCode::Congruence, "dispersion planes do not match raster");

    FeatureVector f{};
    const float* plane[3] = {planes.entropy.data(), planes.margin.data(),
                             planes.varratio.data()};
    const std::span<const std::uint32_t> regions[3] = {seg.pixels,
                                                       seg.boundary, seg.inner};
    for (int d = 0; d < 3; ++d) {
        for (int r = 0; r < 3; ++r) {
            const MeanVar mv = region_stats(regions[r], plane[d]);
            f[d * 6 + r * 2] = mv.mean;
            f[d * 6 + r * 2 + 1] = mv.var;
        }
    }
    for (int r = 0; r < 3; ++r) {
        const MeanVar mv = class_prob_stats(regions[r], prob, seg.cls);
        f[kClassprobMean + r * 2] = mv.mean;
        f[kClassprobMean + r * 2 + 1] = mv.var;
    }

    const double s = static_cast<double>(seg.pixels.size());
    const double s_bd = static_cast<double>(seg.boundary.size());
    const double s_in = static_cast<double>(seg.inner.size());
    f[kSize] = s;
    f[kSizeIn] = s_in;
    f[kSizeBd] = s_bd;
    f[kSizeRel] = s / s_bd;  // every segment has at least one boundary pixel
    f[kSizeInRel] = s_in / s_bd;

    f[kEntropyRel] = f[kEntropyMean] * f[kSizeRel];
    f[kEntropyInRel] = f[kEntropyMean + 4] * f[kSizeInRel];
    f[kMarginRel] = f[kMarginMean] * f[kSizeRel];
    f[kMarginInRel] = f[kMarginMean + 4] * f[kSizeInRel];
    f[kVarratioRel] = f[kVarratioMean] * f[kSizeRel];
    f[kVarratioInRel] = f[kVarratioMean + 4] * f[kSizeInRel];
    return f;
}

FeatureVector segment_features(const Segment& seg, const ProbMap& prob) {
    // same code path as the bulk route so results are bit-identical
    return segment_features(seg, prob, compute_dispersion_planes(prob));
}

GtComponents GtComponents::build(const LabelMask& gt) {
    GtComponents out;
    out.component_of.assign(gt.pixel_count(), -1);
    out.class_pixel_count.assign(gt.num_classes(), 0);
    const auto segments = connected_components(gt);
    out.component_size.reserve(segments.size());
    out.component_class.reserve(segments.size());
    for (std::size_t s = 0; s < segments.size(); ++s) {
        out.component_size.push_back(
            static_cast<std::int64_t>(segments[s].pixels.size()));
        out.component_class.push_back(segments[s].cls);
        out.class_pixel_count[segments[s].cls] +=
            static_cast<std::int64_t>(segments[s].pixels.size());
        for (std::uint32_t p : segments[s].pixels)
            out.component_of[p] = static_cast<std::int32_t>(s);
    }
    return out;
}

double segment_iou(const Segment& seg, const GtComponents& gtc,
                   SegmentIouMode mode) {
    const int cls = seg.cls;
    std::int64_t intersection = 0;
    std::vector<std::int32_t> touched;
    for (std::uint32_t p : seg.pixels) {
        const std::int32_t comp = gtc.component_of[p];
        if (comp < 0 || gtc.component_class[comp] != cls) continue;
        ++intersection;
        touched.push_back(comp);
    }
    if (intersection == 0) return 0.0;

    std::int64_t gt_area = 0;
    if (mode == SegmentIouMode::FullClass) {
        gt_area = gtc.class_pixel_count[cls];
    } else {
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()),
                      touched.end());
        for (std::int32_t comp : touched) gt_area += gtc.component_size[comp];
    }
    const std::int64_t union_count =
        static_cast<std::int64_t>(seg.pixels.size()) + gt_area - intersection;
    return static_cast<double>(intersection) /
           static_cast<double>(union_count);
}

double segment_iou(const Segment& seg, const LabelMask& gt,
                   SegmentIouMode mode) {
    return segment_iou(seg, GtComponents::build(gt), mode);
}

std::vector<SegmentRecord> extract_records(
    const std::string& image_id, DomainTag domain, const LabelMask& pred,
    const std::optional<ProbMap>& prob, const LabelMask& gt,
    const SegmentExtractOptions& opts) {
    if (!prob)
        raise(ErrorCode::MissingProbabilities,
              "segment features need a probability raster for " + image_id);
    pred.require_congruent(gt);

    const auto planes = compute_dispersion_planes(*prob);
    const auto gtc = GtComponents::build(gt);
    auto segments = connected_components(pred);

    std::vector<SegmentRecord> records;
    records.reserve(segments.size());
    for (std::size_t s = 0; s < segments.size(); ++s) {
        split_boundary_inner(segments[s], pred);
        SegmentRecord rec;
        rec.image_id = image_id;
        rec.segment_index = static_cast<int>(s);
        rec.domain = domain;
        rec.cls = segments[s].cls;
        rec.features = segment_features(segments[s], *prob, planes);
        rec.segment_iou = segment_iou(segments[s], gtc, opts.iou_mode);
        rec.is_error = rec.segment_iou == 0.0;
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace segtransfer
