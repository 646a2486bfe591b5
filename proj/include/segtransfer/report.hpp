#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "segtransfer/analysis.hpp"

namespace segtransfer {

inline constexpr const char* kToolName = "segtransfer";
inline constexpr const char* kToolVersion = "0.1.0";

struct ReportMeta {
    std::uint64_t seed = 0;
    std::string config_hash;
    int num_classes = 0;
    std::vector<std::string> class_names;
    std::size_t sample_count = 0;
};

// The single JSON document bundling every analysis output; key order is
// fixed so identical runs produce identical bytes.
nlohmann::ordered_json build_report(const AnalysisResult& result,
                                    const ReportMeta& meta);

// Section builders, also used by the narrower CLI subcommands.
nlohmann::ordered_json correlation_json(const CorrelationReport& corr,
                                        const ScoreSeries& miou_series,
                                        const ReportMeta& meta);
nlohmann::ordered_json errordist_json(const DomainErrorAnalysis& real,
                                      const DomainErrorAnalysis& syn,
                                      const ReportMeta& meta);
nlohmann::ordered_json discriminator_json(
    std::span<const DiscriminatorResult> results,
    std::span<const DiscriminatorSkip> skips, bool ran, const ReportMeta& meta);

void write_json(const std::filesystem::path& path,
                const nlohmann::ordered_json& doc);
nlohmann::ordered_json read_json(const std::filesystem::path& path);

nlohmann::ordered_json ruleset_to_json(const RuleSet& ruleset);
RuleSet ruleset_from_json(const nlohmann::ordered_json& doc);

}  // namespace segtransfer
