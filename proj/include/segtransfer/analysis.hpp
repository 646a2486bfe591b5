#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segtransfer/config.hpp"
#include "segtransfer/errordist.hpp"
#include "segtransfer/paircorr.hpp"
#include "segtransfer/raster.hpp"
#include "segtransfer/rules.hpp"
#include "segtransfer/segments.hpp"

namespace segtransfer {

// End-to-end analysis over a loaded paired dataset: correlation, error
// distributions, segment extraction, and the rule discriminator.

struct DomainErrorAnalysis {
    // index = class; absent when no image contributes the class
    std::vector<std::optional<ClassErrorProfile>> profiles;
    // per class, per axis (classes in index order then "invalid"):
    // distribution of the per-image scores; empty when the profile is absent
    std::vector<std::vector<BoxplotStats>> boxplots;
};

struct DiscriminatorSkip {
    int cls = 0;
    SegmentFilter variant = SegmentFilter::AllSegments;
    std::string reason;
};

struct AnalysisResult {
    int num_classes = 0;
    std::size_t sample_count = 0;
    CorrelationReport correlation;
    ScoreSeries miou_series;
    DomainErrorAnalysis errors_real;
    DomainErrorAnalysis errors_syn;
    bool segments_extracted = false;
    std::string segments_skip_reason;
    std::vector<SegmentRecord> records;  // both domains, deterministic order
    std::vector<DiscriminatorResult> discriminator_results;
    std::vector<DiscriminatorSkip> discriminator_skips;
};

struct AnalyzeOptions {
    ToolConfig config;
    std::uint64_t seed = 42;
    std::size_t threads = 1;
};

AnalysisResult analyze_samples(std::span<const PairedSample> samples,
                               const AnalyzeOptions& opts);

// Per-domain error profiles and boxplots (first = real, second = synthetic).
std::pair<DomainErrorAnalysis, DomainErrorAnalysis> error_analysis(
    std::span<const PairedSample> samples, std::size_t threads);

// Segment records for every sample and both channels, merged in
// (sample, domain) order; requires probability rasters on every sample.
std::vector<SegmentRecord> extract_all_records(
    std::span<const PairedSample> samples, const SegmentExtractOptions& opts,
    std::size_t threads);

// Discriminator over every class and both variants; classes that cannot be
// learned are reported as skips, never as failures.
std::pair<std::vector<DiscriminatorResult>, std::vector<DiscriminatorSkip>>
run_all_discriminators(std::span<const SegmentRecord> records, int num_classes,
                       const RuleFitConfig& cfg);

}  // namespace segtransfer
