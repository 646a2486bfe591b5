#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segtransfer/raster.hpp"

namespace segtransfer {

// Error-distribution analysis: per-class normalized true-positive and
// false-negative scores, per image and aggregated per dataset.

// One image's normalized confusion row for ground-truth class c:
//   tp     = |gt = c, pred = c| / |Y_c|
//   fn[k]  = |gt = c, pred = k| / |Y_c|   (k != c; fn[c] is kept 0)
//   invalid = |gt = c, pred = ignore| / |Y_c|
// tp + sum(fn) + invalid == 1 up to rounding of exact integer ratios.
struct PerImageErrorRow {
    std::string sample_id;
    int cls = 0;
    double tp = 0.0;
    std::vector<double> fn;  // size C, entry cls unused (0)
    double invalid = 0.0;
};

struct ClassErrorProfile {
    int cls = 0;
    double tps = 0.0;
    std::vector<double> fns;  // size C, entry cls unused (0)
    double invalid = 0.0;
    std::int64_t contributing_images = 0;
};

// Tukey box statistics; whiskers at the most extreme values within
// 1.5 * IQR of the quartiles, everything beyond listed as outliers.
struct BoxplotStats {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
    std::vector<double> outliers;
};

// Radar series for one class: axes are the classes in index order plus a
// final "invalid" axis; axis c carries TPS_c, axis k != c carries FNS_{c,k}.
// One closed polyline per dataset.
struct RadarSeries {
    int cls = 0;
    std::vector<std::string> axis_labels;
    std::vector<std::pair<std::string, std::vector<double>>> polylines;
};

// Absent when the image has no ground-truth pixels of class c.
std::optional<PerImageErrorRow> per_image_errors(const LabelMask& pred,
                                                 const LabelMask& gt, int cls,
                                                 std::string sample_id = {});
// Same row derived from a precomputed confusion matrix.
std::optional<PerImageErrorRow> per_image_errors(const ConfusionMatrix& cm,
                                                 int cls,
                                                 std::string sample_id = {});

// Arithmetic mean over the contributing images (pairwise summation); images
// lacking the class never contribute and the mean divides by
// contributing_images, not the dataset size.
ClassErrorProfile aggregate_profile(std::span<const PerImageErrorRow> rows,
                                    int cls);

RadarSeries radar_data(
    const std::vector<std::pair<std::string, ClassErrorProfile>>& profiles,
    std::span<const std::string> class_names = {});

BoxplotStats boxplot_stats(std::span<const double> values);

}  // namespace segtransfer
