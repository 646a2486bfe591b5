#include "segtransfer/errordist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segtransfer/mask_metrics.hpp"
#include "segtransfer/numerics.hpp"

namespace segtransfer {

std::optional<PerImageErrorRow> per_image_errors(const ConfusionMatrix& cm,
                                                 int cls,
                                                 std::string sample_id) {
    if (cls < 0 || cls >= cm.num_classes())
        raise(ErrorCode::Domain, "class index out of range");
    const std::int64_t total = cm.gt_count(cls);
    if (total == 0) return std::nullopt;

    PerImageErrorRow row;
    row.sample_id = std::move(sample_id);
    row.cls = cls;
    row.fn.assign(cm.num_classes(), 0.0);
    const double denom = static_cast<double>(total);
    for (int k = 0; k < cm.num_classes(); ++k) {
        const double v = static_cast<double>(cm.at(cls, k)) / denom;
        if (k == cls)
            row.tp = v;
        else
            row.fn[k] = v;
    }
    row.invalid = static_cast<double>(cm.invalid(cls)) / denom;
    return row;
}

std::optional<PerImageErrorRow> per_image_errors(const LabelMask& pred,
                                                 const LabelMask& gt, int cls,
                                                 std::string sample_id) {
    pred.require_congruent(gt);
    return per_image_errors(confusion(pred, gt), cls, std::move(sample_id));
}

ClassErrorProfile aggregate_profile(std::span<const PerImageErrorRow> rows,
                                    int cls) {
    if (rows.empty())
        raise(ErrorCode::InsufficientData,
              "no contributing images for class " + std::to_string(cls));
    const std::size_t num_classes = rows.front().fn.size();
    std::vector<double> tps, invalids;
    std::vector<std::vector<double>> fns(num_classes);
    tps.reserve(rows.size());
    invalids.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.cls != cls)
            raise(ErrorCode::Congruence,
                  "row for class " + std::to_string(row.cls) +
                      " in aggregation for class " + std::to_string(cls));
        tps.push_back(row.tp);
        invalids.push_back(row.invalid);
        for (std::size_t k = 0; k < num_classes; ++k)
            fns[k].push_back(row.fn[k]);
    }
    ClassErrorProfile profile;
    profile.cls = cls;
    profile.contributing_images = static_cast<std::int64_t>(rows.size());
    profile.tps = pairwise_mean(tps);
    profile.invalid = pairwise_mean(invalids);
    profile.fns.resize(num_classes);
    for (std::size_t k = 0; k < num_classes; ++k)
        profile.fns[k] = pairwise_mean(fns[k]);
    return profile;
}

RadarSeries radar_data(
    const std::vector<std::pair<std::string, ClassErrorProfile>>& profiles,
    std::span<const std::string> class_names) {
    if (profiles.empty())
        raise(ErrorCode::InsufficientData, "no profiles for radar series");
    RadarSeries series;
    series.cls = profiles.front().second.cls;
    const std::size_t num_classes = profiles.front().second.fns.size();
    for (const auto& [name, profile] : profiles) {
        if (profile.cls != series.cls || profile.fns.size() != num_classes)
            raise(ErrorCode::Congruence,
                  "radar profiles disagree on class or class count");
        std::vector<double> axes(num_classes + 1, 0.0);
        for (std::size_t k = 0; k < num_classes; ++k)
            axes[k] = (static_cast<int>(k) == profile.cls) ? profile.tps
                                                           : profile.fns[k];
        axes[num_classes] = profile.invalid;
        series.polylines.emplace_back(name, std::move(axes));
    }
    series.axis_labels.reserve(num_classes + 1);
    for (std::size_t k = 0; k < num_classes; ++k)
        series.axis_labels.push_back(k < class_names.size()
                                         ? class_names[k]
                                         : "class_" + std::to_string(k));
    series.axis_labels.push_back("invalid");
    return series;
}

namespace {

// Type-7 quantile (linear interpolation between order statistics).
double quantile_sorted(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BoxplotStats boxplot_stats(std::span<const double> values) {
    if (values.empty())
        raise(ErrorCode::InsufficientData, "boxplot of an empty distribution");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    BoxplotStats stats;
    stats.q1 = quantile_sorted(sorted, 0.25);
    stats.median = quantile_sorted(sorted, 0.50);
    stats.q3 = quantile_sorted(sorted, 0.75);
    const double iqr = stats.q3 - stats.q1;
    const double lo_fence = stats.q1 - 1.5 * iqr;
    const double hi_fence = stats.q3 + 1.5 * iqr;

    // whisker ends: the most extreme values still inside the fences; at
    // least one datum is always inside (the middle order statistic lies
    // within [q1, q3])
    stats.min = std::numeric_limits<double>::infinity();
    stats.max = -std::numeric_limits<double>::infinity();
    for (double v : sorted) {
        if (v < lo_fence || v > hi_fence) {
            stats.outliers.push_back(v);
        } else {
            stats.min = std::min(stats.min, v);
            stats.max = std::max(stats.max, v);
        }
    }
    return stats;
}

}  // namespace segtransfer
