#include "segtransfer/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "segtransfer/rng.hpp"

namespace segtransfer {

const char* segment_filter_name(SegmentFilter filter) {
    return filter == SegmentFilter::AllSegments ? "all" : "errors_only";
}

std::pair<std::vector<SegmentRecord>, std::vector<SegmentRecord>>
split_dataset(std::span<const SegmentRecord> records, double fraction,
              std::uint64_t seed) {
    const std::size_t n = records.size();
    if (n < 2)
        raise(ErrorCode::InsufficientData,
              "need at least two records to split");
    const std::size_t train_n =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (train_n == 0 || train_n >= n)
        raise(ErrorCode::InsufficientData,
              "split fraction " + std::to_string(fraction) +
                  " leaves an empty train or test side");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    // Fisher-Yates with the stable bounded draw
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = rng.next_below(i + 1);
        std::swap(order[i], order[j]);
    }
    std::pair<std::vector<SegmentRecord>, std::vector<SegmentRecord>> out;
    out.first.reserve(train_n);
    out.second.reserve(n - train_n);
    for (std::size_t i = 0; i < n; ++i)
        (i < train_n ? out.first : out.second).push_back(records[order[i]]);
    return out;
}

namespace {

struct SplitScan {
    int feature = -1;
    double threshold = 0.0;
    double gini = std::numeric_limits<double>::infinity();
};

double gini_impurity(std::int64_t targets, std::int64_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(targets) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

// Exhaustive midpoint threshold scan for one feature over the node rows.
void scan_feature(std::span<const SegmentRecord> train,
                  std::span<const std::uint32_t> rows, int feature,
                  std::span<const char> is_target, SplitScan& best) {
    const std::size_t n = rows.size();
    std::vector<std::pair<double, bool>> vals;
    vals.reserve(n);
    std::int64_t total_targets = 0;
    for (std::uint32_t r : rows) {
        vals.emplace_back(train[r].features[feature], is_target[r]);
        total_targets += is_target[r];
    }
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::int64_t left_n = 0, left_t = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        ++left_n;
        left_t += vals[i].second;
        if (vals[i].first == vals[i + 1].first) continue;  // no boundary here
        const std::int64_t right_n = static_cast<std::int64_t>(n) - left_n;
        const std::int64_t right_t = total_targets - left_t;
        const double g =
            (static_cast<double>(left_n) * gini_impurity(left_t, left_n) +
             static_cast<double>(right_n) * gini_impurity(right_t, right_n)) /
            static_cast<double>(n);
        if (g < best.gini) {
            best.gini = g;
            best.feature = feature;
            best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
        }
    }
}

// Root scans reuse one argsort per feature across all estimators: the walk
// visits the tree's subsample through a membership mask, which turns the
// per-tree cost from O(s log s) sorts into O(n) passes. Boundary handling
// matches scan_feature exactly (ties carry no boundary), so both paths pick
// identical splits.
struct SharedOrders {
    std::vector<std::vector<std::uint32_t>> by_feature;

    static SharedOrders build(std::span<const SegmentRecord> train) {
        SharedOrders out;
        out.by_feature.resize(FeatureRegistry::kCount);
        std::vector<std::uint32_t> base(train.size());
        std::iota(base.begin(), base.end(), std::uint32_t{0});
        for (int f = 0; f < FeatureRegistry::kCount; ++f) {
            auto& ord = out.by_feature[f];
            ord = base;
            std::stable_sort(ord.begin(), ord.end(),
                             [&](std::uint32_t a, std::uint32_t b) {
                                 return train[a].features[f] <
                                        train[b].features[f];
                             });
        }
        return out;
    }
};

void scan_feature_ordered(std::span<const SegmentRecord> train,
                          std::span<const std::uint32_t> order,
                          std::span<const char> in_tree, std::size_t n_rows,
                          std::int64_t total_targets, int feature,
                          std::span<const char> is_target, SplitScan& best) {
    std::int64_t left_n = 0, left_t = 0;
    double prev_value = 0.0;
    bool have_prev = false;
    for (std::uint32_t r : order) {
        if (!in_tree[r]) continue;
        const double v = train[r].features[feature];
        if (have_prev && v != prev_value &&
            left_n < static_cast<std::int64_t>(n_rows)) {
            const std::int64_t right_n =
                static_cast<std::int64_t>(n_rows) - left_n;
            const std::int64_t right_t = total_targets - left_t;
            const double g =
                (static_cast<double>(left_n) * gini_impurity(left_t, left_n) +
                 static_cast<double>(right_n) *
                     gini_impurity(right_t, right_n)) /
                static_cast<double>(n_rows);
            if (g < best.gini) {
                best.gini = g;
                best.feature = feature;
                best.threshold = 0.5 * (prev_value + v);
            }
        }
        ++left_n;
        left_t += is_target[r];
        prev_value = v;
        have_prev = true;
    }
}

// (feature, <=) conditions keep the tightest threshold; (feature, >) the
// loosest, so a path is stored in canonical conjunctive form.
void append_canonical(std::vector<RuleCondition>& conds, int feature,
                      bool greater, double threshold) {
    for (auto& c : conds) {
        if (c.feature == feature && c.greater == greater) {
            c.threshold = greater ? std::max(c.threshold, threshold)
                                  : std::min(c.threshold, threshold);
            return;
        }
    }
    conds.push_back({feature, greater, threshold});
}

void sort_conditions(std::vector<RuleCondition>& conds) {
    std::sort(conds.begin(), conds.end(), [](const auto& a, const auto& b) {
        if (a.feature != b.feature) return a.feature < b.feature;
        if (a.greater != b.greater) return a.greater < b.greater;
        return a.threshold < b.threshold;
    });
}

bool rule_matches(const Rule& rule, const SegmentRecord& rec) {
    for (const auto& c : rule.conditions) {
        if (c.feature < 0 || c.feature >= FeatureRegistry::kCount)
            raise(ErrorCode::Registry, "rule condition references feature " +
                                           std::to_string(c.feature));
        const double v = rec.features[c.feature];
        if (c.greater ? !(v > c.threshold) : !(v <= c.threshold)) return false;
    }
    return true;
}

struct RootScan {
    const SharedOrders* orders = nullptr;
    std::span<const char> in_tree;
};

void grow_node(std::span<const SegmentRecord> train,
               std::vector<std::uint32_t>& rows,
               std::span<const int> features, std::span<const char> is_target,
               int depth, int max_depth, const RootScan& root_scan,
               std::vector<RuleCondition>& path,
               std::vector<std::vector<RuleCondition>>& leaves) {
    std::int64_t targets = 0;
    for (std::uint32_t r : rows) targets += is_target[r];
    const std::int64_t total = static_cast<std::int64_t>(rows.size());

    auto emit_if_target_leaf = [&] {
        // strict majority; empty paths (unsplit root) carry no information
        if (2 * targets > total && !path.empty()) leaves.push_back(path);
    };

    if (depth >= max_depth || targets == 0 || targets == total ||
        rows.size() < 2) {
        emit_if_target_leaf();
        return;
    }

    SplitScan best;
    if (depth == 0 && root_scan.orders) {
        for (int f : features)
            scan_feature_ordered(train, root_scan.orders->by_feature[f],
                                 root_scan.in_tree, rows.size(), targets, f,
                                 is_target, best);
    } else {
        for (int f : features) scan_feature(train, rows, f, is_target, best);
    }
    if (best.feature < 0) {  // all candidate features constant on this node
        emit_if_target_leaf();
        return;
    }

    std::vector<std::uint32_t> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (std::uint32_t r : rows)
        (train[r].features[best.feature] <= best.threshold ? left : right)
            .push_back(r);

    append_canonical(path, best.feature, false, best.threshold);
    grow_node(train, left, features, is_target, depth + 1, max_depth,
              root_scan, path, leaves);
    path.pop_back();

    append_canonical(path, best.feature, true, best.threshold);
    grow_node(train, right, features, is_target, depth + 1, max_depth,
              root_scan, path, leaves);
    path.pop_back();
}

}  // namespace

std::vector<Rule> fit_tree(std::span<const SegmentRecord> train,
                           DomainTag target, const RuleFitConfig& cfg) {
    const std::size_t n = train.size();
    if (n < 2)
        raise(ErrorCode::InsufficientData, "training set too small");
    std::vector<char> is_target(n);
    std::size_t target_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        is_target[i] = train[i].domain == target;
        target_count += is_target[i];
    }
    if (target_count == 0 || target_count == n)
        raise(ErrorCode::DegenerateData,
              "training data contains a single domain; cannot learn rules");

    const std::size_t rows_per_tree = std::min(
        n, std::max<std::size_t>(
               2, static_cast<std::size_t>(std::llround(
                      cfg.row_subsample * static_cast<double>(n)))));
    const SharedOrders orders = SharedOrders::build(train);
    std::vector<char> in_tree(n, 0);
    const int feats_per_tree = std::clamp(
        static_cast<int>(std::llround(cfg.feature_subsample *
                                      FeatureRegistry::kCount)),
        1, FeatureRegistry::kCount);

    std::vector<Rule> candidates;
    for (int est = 0; est < cfg.n_estimators; ++est) {
        // fixed splitting function so estimators can run in any order
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(est),
                            "estimator"));

        // rows without replacement (partial Fisher-Yates)
        std::vector<std::uint32_t> pool(n);
        std::iota(pool.begin(), pool.end(), std::uint32_t{0});
        for (std::size_t i = 0; i < rows_per_tree; ++i) {
            const std::size_t j =
                i + static_cast<std::size_t>(rng.next_below(n - i));
            std::swap(pool[i], pool[j]);
        }
        std::vector<std::uint32_t> rows(pool.begin(),
                                        pool.begin() + rows_per_tree);
        std::sort(rows.begin(), rows.end());
        std::fill(in_tree.begin(), in_tree.end(), 0);
        for (std::uint32_t r : rows) in_tree[r] = 1;

        // features without replacement, kept sorted for a deterministic scan
        std::vector<int> fpool(FeatureRegistry::kCount);
        std::iota(fpool.begin(), fpool.end(), 0);
        for (int i = 0; i < feats_per_tree; ++i) {
            const int j = i + static_cast<int>(rng.next_below(
                                  FeatureRegistry::kCount - i));
            std::swap(fpool[i], fpool[j]);
        }
        std::vector<int> features(fpool.begin(), fpool.begin() + feats_per_tree);
        std::sort(features.begin(), features.end());

        std::vector<std::vector<RuleCondition>> leaves;
        std::vector<RuleCondition> path;
        const RootScan root_scan{&orders, in_tree};
        grow_node(train, rows, features, is_target, 0, cfg.max_depth,
                  root_scan, path, leaves);

        for (auto& conds : leaves) {
            Rule rule;
            rule.conditions = std::move(conds);
            sort_conditions(rule.conditions);
            rule.target = target;
            // stats on the full training set, not the subsample
            std::int64_t covered = 0, covered_targets = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!rule_matches(rule, train[i])) continue;
                ++covered;
                covered_targets += is_target[i];
            }
            if (covered == 0) continue;
            rule.precision = static_cast<double>(covered_targets) /
                             static_cast<double>(covered);
            rule.recall = static_cast<double>(covered_targets) /
                          static_cast<double>(target_count);
            rule.f1 = (rule.precision + rule.recall) > 0.0
                          ? 2.0 * rule.precision * rule.recall /
                                (rule.precision + rule.recall)
                          : 0.0;
            candidates.push_back(std::move(rule));
        }
    }
    return candidates;
}

namespace {

int compare_conditions(const std::vector<RuleCondition>& a,
                       const std::vector<RuleCondition>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].feature != b[i].feature)
            return a[i].feature < b[i].feature ? -1 : 1;
        if (a[i].greater != b[i].greater) return a[i].greater ? 1 : -1;
        if (a[i].threshold != b[i].threshold)
            return a[i].threshold < b[i].threshold ? -1 : 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

bool semantically_equal(const Rule& a, const Rule& b) {
    if (a.conditions.size() != b.conditions.size()) return false;
    for (std::size_t i = 0; i < a.conditions.size(); ++i) {
        const auto& ca = a.conditions[i];
        const auto& cb = b.conditions[i];
        if (ca.feature != cb.feature || ca.greater != cb.greater ||
            std::abs(ca.threshold - cb.threshold) > 1e-9)
            return false;
    }
    return true;
}

}  // namespace

RuleSet select_rules(std::vector<Rule> candidates, const RuleFitConfig& cfg) {
    if (candidates.empty())
        raise(ErrorCode::NoRule, "no candidate rules to select from");
    std::vector<Rule> filtered;
    for (auto& rule : candidates) {
        if (rule.precision >= cfg.precision_min &&
            rule.recall >= cfg.recall_min)
            filtered.push_back(std::move(rule));
    }
    if (filtered.empty())
        raise(ErrorCode::NoRule,
              "no rule reached precision " + std::to_string(cfg.precision_min) +
                  " and recall " + std::to_string(cfg.recall_min));

    std::sort(filtered.begin(), filtered.end(),
              [](const Rule& a, const Rule& b) {
                  if (a.f1 != b.f1) return a.f1 > b.f1;
                  if (a.precision != b.precision) return a.precision > b.precision;
                  return compare_conditions(a.conditions, b.conditions) < 0;
              });

    RuleSet out;
    out.target = filtered.front().target;
    for (auto& rule : filtered) {
        bool duplicate = false;
        for (const auto& kept : out.rules)
            if (semantically_equal(rule, kept)) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;
        out.rules.push_back(std::move(rule));
        if (static_cast<int>(out.rules.size()) >= cfg.top_k) break;
    }
    return out;
}

DomainTag predict(const RuleSet& ruleset, const SegmentRecord& record) {
    for (const auto& rule : ruleset.rules)
        if (rule_matches(rule, record)) return ruleset.target;
    return ruleset.target == DomainTag::Real ? DomainTag::Synthetic
                                             : DomainTag::Real;
}

DiscriminatorResult run_discriminator(std::span<const SegmentRecord> records,
                                      int cls, SegmentFilter variant,
                                      const RuleFitConfig& cfg) {
    std::vector<SegmentRecord> filtered;
    std::size_t n_real = 0, n_syn = 0;
    for (const auto& rec : records) {
        if (rec.cls != cls) continue;
        if (variant == SegmentFilter::ErrorsOnly && !rec.is_error) continue;
        filtered.push_back(rec);
        (rec.domain == DomainTag::Real ? n_real : n_syn) += 1;
    }
    if (std::min(n_real, n_syn) < 2)
        raise(ErrorCode::DegenerateData,
              "class " + std::to_string(cls) + " (" +
                  segment_filter_name(variant) +
                  "): not enough components in both domains to learn rules");

    // minority domain is the rule target; ties break toward synthetic
    const DomainTag target =
        n_real < n_syn ? DomainTag::Real : DomainTag::Synthetic;

    const std::uint64_t split_seed = derive_seed(
        cfg.seed, static_cast<std::uint64_t>(cls),
        variant == SegmentFilter::AllSegments ? "split-all" : "split-errors");
    auto [train, test] = split_dataset(filtered, cfg.split_fraction, split_seed);

    RuleFitConfig fit_cfg = cfg;
    fit_cfg.seed = derive_seed(
        cfg.seed, static_cast<std::uint64_t>(cls),
        variant == SegmentFilter::AllSegments ? "fit-all" : "fit-errors");
    RuleSet ruleset = select_rules(fit_tree(train, target, fit_cfg), fit_cfg);

    DiscriminatorResult result;
    result.cls = cls;
    result.variant = variant;
    result.target = target;
    result.train_size = train.size();
    result.test_size = test.size();

    std::size_t correct = 0;
    std::size_t test_real = 0, test_syn = 0, correct_real = 0, correct_syn = 0;
    for (const auto& rec : test) {
        const DomainTag got = predict(ruleset, rec);
        const bool ok = got == rec.domain;
        correct += ok;
        if (rec.domain == DomainTag::Real) {
            ++test_real;
            correct_real += ok;
        } else {
            ++test_syn;
            correct_syn += ok;
        }
    }
    result.accuracy =
        static_cast<double>(correct) / static_cast<double>(test.size());
    double bal = 0.0;
    int domains = 0;
    if (test_real > 0) {
        bal += static_cast<double>(correct_real) / static_cast<double>(test_real);
        ++domains;
    }
    if (test_syn > 0) {
        bal += static_cast<double>(correct_syn) / static_cast<double>(test_syn);
        ++domains;
    }
    result.balanced_accuracy = domains > 0 ? bal / domains : 0.0;
    result.majority_baseline =
        static_cast<double>(std::max(test_real, test_syn)) /
        static_cast<double>(test.size());
    result.ruleset = std::move(ruleset);
    return result;
}

}  // namespace segtransfer
