#include "segtransfer/analysis.hpp"

#include <tuple>

#include "segtransfer/mask_metrics.hpp"
#include "segtransfer/parallel.hpp"
#include "segtransfer/rng.hpp"

namespace segtransfer {

namespace {

// Per-image error rows for both domains, gathered per class.
struct ErrorRows {
    // [class] -> rows across contributing images
    std::vector<std::vector<PerImageErrorRow>> real;
    std::vector<std::vector<PerImageErrorRow>> syn;
};

ErrorRows collect_error_rows(std::span<const PairedSample> samples,
                             int num_classes, std::size_t threads) {
    struct PerSample {
        std::vector<std::optional<PerImageErrorRow>> real, syn;
    };
    std::vector<PerSample> rows(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        const auto& s = samples[i];
        const auto cm_real = confusion(s.pred_real, s.gt);
        const auto cm_syn = confusion(s.pred_syn, s.gt);
        PerSample ps;
        ps.real.resize(num_classes);
        ps.syn.resize(num_classes);
        for (int c = 0; c < num_classes; ++c) {
            ps.real[c] = per_image_errors(cm_real, c, s.sample_id);
            ps.syn[c] = per_image_errors(cm_syn, c, s.sample_id);
        }
        rows[i] = std::move(ps);
    });

    ErrorRows out;
    out.real.resize(num_classes);
    out.syn.resize(num_classes);
    for (const auto& ps : rows) {
        for (int c = 0; c < num_classes; ++c) {
            if (ps.real[c]) out.real[c].push_back(*ps.real[c]);
            if (ps.syn[c]) out.syn[c].push_back(*ps.syn[c]);
        }
    }
    return out;
}

DomainErrorAnalysis summarize_domain(
    const std::vector<std::vector<PerImageErrorRow>>& rows_per_class,
    int num_classes) {
    DomainErrorAnalysis out;
    out.profiles.resize(num_classes);
    out.boxplots.resize(num_classes);
    for (int c = 0; c < num_classes; ++c) {
        const auto& rows = rows_per_class[c];
        if (rows.empty()) continue;
        out.profiles[c] = aggregate_profile(rows, c);
        // one distribution per radar axis: classes in order, then invalid
        auto& boxes = out.boxplots[c];
        boxes.reserve(num_classes + 1);
        std::vector<double> values(rows.size());
        for (int axis = 0; axis <= num_classes; ++axis) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (axis == num_classes)
                    values[i] = rows[i].invalid;
                else if (axis == c)
                    values[i] = rows[i].tp;
                else
                    values[i] = rows[i].fn[axis];
            }
            boxes.push_back(boxplot_stats(values));
        }
    }
    return out;
}

}  // namespace

std::pair<DomainErrorAnalysis, DomainErrorAnalysis> error_analysis(
    std::span<const PairedSample> samples, std::size_t threads) {
    if (samples.empty())
        raise(ErrorCode::EmptyDataset, "no samples to analyze");
    const int num_classes = samples[0].gt.num_classes();
    const auto rows = collect_error_rows(samples, num_classes, threads);
    return {summarize_domain(rows.real, num_classes),
            summarize_domain(rows.syn, num_classes)};
}

std::pair<std::vector<DiscriminatorResult>, std::vector<DiscriminatorSkip>>
run_all_discriminators(std::span<const SegmentRecord> records, int num_classes,
                       const RuleFitConfig& cfg) {
    std::pair<std::vector<DiscriminatorResult>, std::vector<DiscriminatorSkip>>
        out;
    for (int c = 0; c < num_classes; ++c) {
        for (const auto variant :
             {SegmentFilter::AllSegments, SegmentFilter::ErrorsOnly}) {
            try {
                out.first.push_back(
                    run_discriminator(records, c, variant, cfg));
            } catch (const Error& e) {
                out.second.push_back(
                    {c, variant, std::string(error_code_name(e.code())) +
                                     ": " + e.what()});
            }
        }
    }
    return out;
}

std::vector<SegmentRecord> extract_all_records(
    std::span<const PairedSample> samples, const SegmentExtractOptions& opts,
    std::size_t threads) {
    std::vector<std::vector<SegmentRecord>> per_sample(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        const auto& s = samples[i];
        auto recs = extract_records(s.sample_id, DomainTag::Real, s.pred_real,
                                    s.prob_real, s.gt, opts);
        auto syn = extract_records(s.sample_id, DomainTag::Synthetic,
                                   s.pred_syn, s.prob_syn, s.gt, opts);
        recs.insert(recs.end(), std::make_move_iterator(syn.begin()),
                    std::make_move_iterator(syn.end()));
        per_sample[i] = std::move(recs);
    });
    std::vector<SegmentRecord> records;
    for (auto& recs : per_sample)
        records.insert(records.end(), std::make_move_iterator(recs.begin()),
                       std::make_move_iterator(recs.end()));
    return records;
}

AnalysisResult analyze_samples(std::span<const PairedSample> samples,
                               const AnalyzeOptions& opts) {
    if (samples.empty())
        raise(ErrorCode::EmptyDataset, "no samples to analyze");
    const int num_classes = samples[0].gt.num_classes();

    AnalysisResult result;
    result.num_classes = num_classes;
    result.sample_count = samples.size();

    CorrOptions corr = opts.config.correlation;
    corr.threads = opts.threads;
    result.correlation = classwise_correlations(samples, corr);
    result.miou_series = build_series(samples, ClassScope::miou(), corr);

    std::tie(result.errors_real, result.errors_syn) =
        error_analysis(samples, opts.threads);

    bool all_probs = true;
    for (const auto& s : samples) all_probs = all_probs && s.has_probs();
    if (!all_probs) {
        result.segments_extracted = false;
        result.segments_skip_reason =
            "probability rasters missing for at least one sample";
        return result;
    }

    result.records =
        extract_all_records(samples, opts.config.segments, opts.threads);
    result.segments_extracted = true;

    RuleFitConfig rule_cfg = opts.config.rules;
    rule_cfg.seed = derive_seed(opts.seed, 0, "rules");
    std::tie(result.discriminator_results, result.discriminator_skips) =
        run_all_discriminators(result.records, num_classes, rule_cfg);
    return result;
}

}  // namespace segtransfer
