#include "segtransfer/paircorr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "segtransfer/mask_metrics.hpp"
#include "segtransfer/numerics.hpp"
#include "segtransfer/parallel.hpp"

namespace segtransfer {

std::pair<std::vector<double>, std::vector<double>>
ScoreSeries::defined_pairs() const {
    std::vector<double> xs, ys;
    xs.reserve(values_real.size());
    ys.reserve(values_real.size());
    for (std::size_t i = 0; i < values_real.size(); ++i) {
        if (values_real[i] && values_syn[i]) {
            xs.push_back(*values_real[i]);
            ys.push_back(*values_syn[i]);
        }
    }
    return {std::move(xs), std::move(ys)};
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        raise(ErrorCode::Congruence, "series lengths differ");
    const std::size_t n = xs.size();
    if (n < 2)
        raise(ErrorCode::UndefinedCorrelation,
              "need at least two pairs for a correlation");

    const double mx = pairwise_mean(xs);
    const double my = pairwise_mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        raise(ErrorCode::UndefinedCorrelation,
              "correlation undefined for a constant series");
    // Cauchy-Schwarz: |sxy| <= sqrt(sxx*syy), equality iff the points are
    // perfectly affine. Compare squares first so the exact cases come out
    // as exactly +-1 rather than 1 +- one ulp of sqrt rounding.
    if (sxy * sxy >= sxx * syy) return sxy > 0.0 ? 1.0 : -1.0;
    return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        raise(ErrorCode::Congruence, "series lengths differ");
    auto ranks = [](std::span<const double> v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(xs);
    const auto ry = ranks(ys);
    return pearson(rx, ry);
}

namespace {

struct SampleScores {
    std::vector<std::optional<double>> iou_real;  // per class
    std::vector<std::optional<double>> iou_syn;
    std::optional<double> miou_real;
    std::optional<double> miou_syn;
    ConfusionMatrix cm_real;
    ConfusionMatrix cm_syn;
};

std::vector<SampleScores> score_samples(std::span<const PairedSample> samples,
                                        std::size_t threads) {
    if (samples.empty())
        raise(ErrorCode::EmptyDataset, "no samples to analyze");
    std::vector<SampleScores> out(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        const auto& s = samples[i];
        s.gt.require_congruent(s.pred_real);
        s.gt.require_congruent(s.pred_syn);
        SampleScores sc;
        sc.cm_real = confusion(s.pred_real, s.gt);
        sc.cm_syn = confusion(s.pred_syn, s.gt);
        sc.iou_real = class_ious(sc.cm_real);
        sc.iou_syn = class_ious(sc.cm_syn);
        sc.miou_real = miou_image_opt(sc.cm_real);
        sc.miou_syn = miou_image_opt(sc.cm_syn);
        out[i] = std::move(sc);
    });
    return out;
}

// A one-sided defined IoU for a class can only be a false-positive-only hit
// (gt lacks the class, one prediction contains it); optionally keep those
// pairs by scoring the undefined side 0.
void apply_fp_rule(std::optional<double>& a, std::optional<double>& b,
                   bool fp_only_as_zero) {
    if (!fp_only_as_zero) return;
    if (a && !b) b = 0.0;
    if (b && !a) a = 0.0;
}

}  // namespace

ScoreSeries build_series(std::span<const PairedSample> samples,
                         ClassScope scope, const CorrOptions& opts) {
    const auto scores = score_samples(samples, opts.threads);
    ScoreSeries out;
    out.scope = scope;
    out.metric_name = scope.name();
    out.sample_ids.reserve(samples.size());
    out.values_real.reserve(samples.size());
    out.values_syn.reserve(samples.size());
    if (!scope.is_miou &&
        (scope.cls < 0 || scope.cls >= samples[0].gt.num_classes()))
        raise(ErrorCode::Domain, "class scope out of range");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.sample_ids.push_back(samples[i].sample_id);
        std::optional<double> r, s;
        if (scope.is_miou) {
            r = scores[i].miou_real;
            s = scores[i].miou_syn;
        } else {
            r = scores[i].iou_real[scope.cls];
            s = scores[i].iou_syn[scope.cls];
            apply_fp_rule(r, s, opts.fp_only_as_zero);
        }
        out.values_real.push_back(r);
        out.values_syn.push_back(s);
    }
    return out;
}

namespace {

struct PairedValues {
    std::vector<double> xs, ys;
};

void correlate_into(const PairedValues& pv, int min_pairs, bool want_spearman,
                    std::int64_t& pair_count, CorrStatus& status,
                    std::optional<double>& r, std::optional<double>& rho) {
    pair_count = static_cast<std::int64_t>(pv.xs.size());
    if (pair_count < std::max(min_pairs, 2)) {
        status = CorrStatus::InsufficientPairs;
        return;
    }
    try {
        r = pearson(pv.xs, pv.ys);
        status = CorrStatus::Ok;
        if (want_spearman) rho = spearman(pv.xs, pv.ys);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UndefinedCorrelation) throw;
        status = CorrStatus::ConstantSeries;
        r.reset();
        rho.reset();
    }
}

}  // namespace

CorrelationReport classwise_correlations(std::span<const PairedSample> samples,
                                         const CorrOptions& opts) {
    const auto scores = score_samples(samples, opts.threads);
    const int num_classes = samples[0].gt.num_classes();

    CorrelationReport report;
    report.options = opts;

    ConfusionMatrix pooled_real(num_classes), pooled_syn(num_classes);
    for (const auto& sc : scores) {
        pooled_real += sc.cm_real;
        pooled_syn += sc.cm_syn;
    }
    const auto pooled_iou_real = class_ious(pooled_real);
    const auto pooled_iou_syn = class_ious(pooled_syn);

    for (int c = 0; c < num_classes; ++c) {
        ClassCorrelation cc;
        cc.cls = c;
        cc.pooled_iou_real = pooled_iou_real[c];
        cc.pooled_iou_syn = pooled_iou_syn[c];

        PairedValues pv;
        std::vector<double> def_real, def_syn;
        for (const auto& sc : scores) {
            auto r = sc.iou_real[c];
            auto s = sc.iou_syn[c];
            if (r) def_real.push_back(*r);
            if (s) def_syn.push_back(*s);
            apply_fp_rule(r, s, opts.fp_only_as_zero);
            if (r && s) {
                pv.xs.push_back(*r);
                pv.ys.push_back(*s);
            }
        }
        if (!def_real.empty()) cc.mean_iou_real = pairwise_mean(def_real);
        if (!def_syn.empty()) cc.mean_iou_syn = pairwise_mean(def_syn);
        correlate_into(pv, opts.min_pairs, opts.with_spearman, cc.pair_count,
                       cc.status, cc.r, cc.spearman_r);
        report.classes.push_back(std::move(cc));
    }

    PairedValues mv;
    for (const auto& sc : scores) {
        if (sc.miou_real && sc.miou_syn) {
            mv.xs.push_back(*sc.miou_real);
            mv.ys.push_back(*sc.miou_syn);
        }
    }
    // the mIoU series is reported whenever a correlation is computable at
    // all; the per-class minimum is about sparse classes, not the headline
    correlate_into(mv, 2, opts.with_spearman, report.miou_pairs,
                   report.miou_status, report.miou_r, report.miou_spearman);
    return report;
}

}  // namespace segtransfer
