#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "segtransfer/segments.hpp"

namespace segtransfer {

// Shallow-tree threshold rules separating real-domain from synthetic-domain
// segment records, class-wise.

struct RuleCondition {
    int feature = 0;     // FeatureRegistry index
    bool greater = false;  // false: value <= threshold, true: value > threshold
    double threshold = 0.0;
};

struct Rule {
    std::vector<RuleCondition> conditions;  // conjunction
    DomainTag target = DomainTag::Synthetic;
    // measured on the full training set
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct RuleFitConfig {
    int n_estimators = 50;
    double row_subsample = 0.8;
    double feature_subsample = 0.5;
    int max_depth = 1;
    double precision_min = 0.6;
    double recall_min = 0.05;
    int top_k = 4;
    double split_fraction = 0.8;
    std::uint64_t seed = 1;
};

struct RuleSet {
    std::vector<Rule> rules;  // disjunction, ranked
    DomainTag target = DomainTag::Synthetic;
};

enum class SegmentFilter { AllSegments, ErrorsOnly };

const char* segment_filter_name(SegmentFilter filter);

struct DiscriminatorResult {
    int cls = 0;
    SegmentFilter variant = SegmentFilter::AllSegments;
    DomainTag target = DomainTag::Synthetic;
    RuleSet ruleset;
    double accuracy = 0.0;           // raw test accuracy
    double balanced_accuracy = 0.0;  // mean per-domain accuracy on test
    double majority_baseline = 0.0;  // majority share of the test split
    std::size_t train_size = 0;
    std::size_t test_size = 0;
};

// Seeded uniform shuffle; first ceil(fraction*n) records become the train
// split. Throws InsufficientData when either side would be empty.
std::pair<std::vector<SegmentRecord>, std::vector<SegmentRecord>>
split_dataset(std::span<const SegmentRecord> records, double fraction,
              std::uint64_t seed);

// Fits n_estimators Gini trees (exhaustive midpoint threshold scan) on row/
// feature subsamples; every root-to-leaf path whose leaf majority is the
// target becomes a candidate rule with precision/recall measured on the full
// training set. Throws DegenerateData when train lacks one of the domains.
std::vector<Rule> fit_tree(std::span<const SegmentRecord> train,
                           DomainTag target, const RuleFitConfig& cfg);

// Filter by the precision/recall minima, deduplicate, rank by F1 (ties:
// precision, then lexicographic condition order), keep the top k. Throws
// NoRule when nothing passes.
RuleSet select_rules(std::vector<Rule> candidates, const RuleFitConfig& cfg);

// Target tag if any rule's conjunction holds, else the other tag.
DomainTag predict(const RuleSet& ruleset, const SegmentRecord& record);

// Full protocol for one class: pick the minority domain as the target
// (ties -> synthetic), split, fit, select, evaluate on the held-out split.
DiscriminatorResult run_discriminator(std::span<const SegmentRecord> records,
                                      int cls, SegmentFilter variant,
                                      const RuleFitConfig& cfg);

}  // namespace segtransfer
