#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segtransfer/raster.hpp"

namespace segtransfer {

// Paired per-image score series for the two domains and the sample
// correlation over them.

struct ClassScope {
    bool is_miou = true;
    int cls = -1;

    static ClassScope miou() { return {}; }
    static ClassScope for_class(int c) { return {false, c}; }
    std::string name() const {
        return is_miou ? "miou" : "iou_class_" + std::to_string(cls);
    }
};

struct ScoreSeries {
    std::vector<std::string> sample_ids;
    // Index-aligned with sample_ids; absent means the metric is undefined
    // for that image on that side (never imputed as 0).
    std::vector<std::optional<double>> values_real;
    std::vector<std::optional<double>> values_syn;
    std::string metric_name;
    ClassScope scope;

    // Pairs where both sides are defined, in sample order.
    std::pair<std::vector<double>, std::vector<double>> defined_pairs() const;
};

struct CorrOptions {
    int min_pairs = 10;            // below this a class reports "insufficient"
    bool fp_only_as_zero = false;  // count one-sided FP-only IoU as 0 instead
                                   // of dropping the pair
    bool with_spearman = false;
    std::size_t threads = 1;
};

enum class CorrStatus {
    Ok,
    InsufficientPairs,
    ConstantSeries,  // correlation undefined: a side has zero variance
};

struct ClassCorrelation {
    int cls = 0;
    std::int64_t pair_count = 0;
    CorrStatus status = CorrStatus::InsufficientPairs;
    std::optional<double> r;
    std::optional<double> spearman_r;
    // Macro mean over images with a defined IoU, per domain.
    std::optional<double> mean_iou_real, mean_iou_syn;
    // Pixel-pooled dataset-level IoU per domain.
    std::optional<double> pooled_iou_real, pooled_iou_syn;
};

struct CorrelationReport {
    std::vector<ClassCorrelation> classes;
    std::int64_t miou_pairs = 0;
    CorrStatus miou_status = CorrStatus::InsufficientPairs;
    std::optional<double> miou_r;
    std::optional<double> miou_spearman;
    CorrOptions options;
};

// Sample Pearson correlation coefficient. Throws Congruence on length
// mismatch, UndefinedCorrelation when n < 2 or either series is constant.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Rank correlation (average ranks on ties), as a robustness alternative.
double spearman(std::span<const double> xs, std::span<const double> ys);

ScoreSeries build_series(std::span<const PairedSample> samples,
                         ClassScope scope, const CorrOptions& opts = {});

CorrelationReport classwise_correlations(std::span<const PairedSample> samples,
                                         const CorrOptions& opts = {});

}  // namespace segtransfer
