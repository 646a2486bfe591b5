#include "segtransfer/report.hpp"

#include <fstream>

namespace segtransfer {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json opt_number(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

const char* corr_status_name(CorrStatus status) {
    switch (status) {
        case CorrStatus::Ok: return "ok";
        case CorrStatus::InsufficientPairs: return "insufficient_samples";
        case CorrStatus::ConstantSeries: return "constant_series";
    }
    return "?";
}

std::string class_label(const ReportMeta& meta, int cls) {
    if (cls >= 0 && cls < static_cast<int>(meta.class_names.size()))
        return meta.class_names[cls];
    return "class_" + std::to_string(cls);
}

ordered_json profile_json(const std::optional<ClassErrorProfile>& profile) {
    if (!profile) return nullptr;
    ordered_json j;
    j["tps"] = profile->tps;
    j["fns"] = profile->fns;
    j["invalid"] = profile->invalid;
    j["contributing_images"] = profile->contributing_images;
    return j;
}

ordered_json boxplots_json(const std::vector<BoxplotStats>& boxes,
                           const std::vector<std::string>& axis_labels) {
    if (boxes.empty()) return nullptr;
    ordered_json arr = ordered_json::array();
    for (std::size_t a = 0; a < boxes.size(); ++a) {
        const auto& b = boxes[a];
        ordered_json j;
        j["axis"] = axis_labels[a];
        j["min"] = b.min;
        j["q1"] = b.q1;
        j["median"] = b.median;
        j["q3"] = b.q3;
        j["max"] = b.max;
        j["outliers"] = b.outliers;
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace

ordered_json ruleset_to_json(const RuleSet& ruleset) {
    ordered_json j;
    j["target"] = domain_name(ruleset.target);
    ordered_json rules = ordered_json::array();
    for (const auto& rule : ruleset.rules) {
        ordered_json r;
        ordered_json conds = ordered_json::array();
        for (const auto& c : rule.conditions) {
            ordered_json cj;
            cj["feature"] = std::string(FeatureRegistry::name(c.feature));
            cj["op"] = c.greater ? ">" : "<=";
            cj["threshold"] = c.threshold;
            conds.push_back(std::move(cj));
        }
        r["conditions"] = std::move(conds);
        r["precision"] = rule.precision;
        r["recall"] = rule.recall;
        r["f1"] = rule.f1;
        rules.push_back(std::move(r));
    }
    j["rules"] = std::move(rules);
    return j;
}

RuleSet ruleset_from_json(const ordered_json& doc) {
    RuleSet out;
    try {
        out.target = domain_from_name(doc.at("target").get<std::string>());
        for (const auto& r : doc.at("rules")) {
            Rule rule;
            rule.target = out.target;
            for (const auto& cj : r.at("conditions")) {
                RuleCondition c;
                c.feature = FeatureRegistry::index_of(
                    cj.at("feature").get<std::string>());
                const std::string op = cj.at("op").get<std::string>();
                if (op == ">")
                    c.greater = true;
                else if (op == "<=")
                    c.greater = false;
                else
                    raise(ErrorCode::CorruptFile,
                          "rule comparator must be <= or >, got " + op);
                c.threshold = cj.at("threshold").get<double>();
                rule.conditions.push_back(c);
            }
            rule.precision = r.value("precision", 0.0);
            rule.recall = r.value("recall", 0.0);
            rule.f1 = r.value("f1", 0.0);
            out.rules.push_back(std::move(rule));
        }
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::CorruptFile, std::string("ruleset JSON: ") + e.what());
    }
    return out;
}

ordered_json correlation_json(const CorrelationReport& corr,
                              const ScoreSeries& miou_series,
                              const ReportMeta& meta) {
    ordered_json cj;
    cj["min_pairs"] = corr.options.min_pairs;
    cj["fp_only_as_zero"] = corr.options.fp_only_as_zero;
    ordered_json miou;
    miou["status"] = corr_status_name(corr.miou_status);
    miou["pairs"] = corr.miou_pairs;
    miou["r"] = opt_number(corr.miou_r);
    if (corr.options.with_spearman)
        miou["spearman"] = opt_number(corr.miou_spearman);
    cj["miou"] = std::move(miou);
    ordered_json classes = ordered_json::array();
    for (const auto& cc : corr.classes) {
        ordered_json c;
        c["class"] = cc.cls;
        c["name"] = class_label(meta, cc.cls);
        c["status"] = corr_status_name(cc.status);
        c["pairs"] = cc.pair_count;
        c["r"] = opt_number(cc.r);
        if (corr.options.with_spearman)
            c["spearman"] = opt_number(cc.spearman_r);
        c["mean_iou_real"] = opt_number(cc.mean_iou_real);
        c["mean_iou_syn"] = opt_number(cc.mean_iou_syn);
        c["pooled_iou_real"] = opt_number(cc.pooled_iou_real);
        c["pooled_iou_syn"] = opt_number(cc.pooled_iou_syn);
        classes.push_back(std::move(c));
    }
    cj["classes"] = std::move(classes);
    // per-image series backing the scatter plot
    ordered_json series;
    series["sample_ids"] = miou_series.sample_ids;
    ordered_json vr = ordered_json::array(), vs = ordered_json::array();
    for (std::size_t i = 0; i < miou_series.values_real.size(); ++i) {
        vr.push_back(opt_number(miou_series.values_real[i]));
        vs.push_back(opt_number(miou_series.values_syn[i]));
    }
    series["miou_real"] = std::move(vr);
    series["miou_syn"] = std::move(vs);
    cj["series"] = std::move(series);
    return cj;
}

ordered_json errordist_json(const DomainErrorAnalysis& real,
                            const DomainErrorAnalysis& syn,
                            const ReportMeta& meta) {
    ordered_json ed;
    ed["domains"] = {"real", "synthetic"};
    ordered_json ed_classes = ordered_json::array();
    std::vector<std::string> axis_labels;
    for (int k = 0; k < meta.num_classes; ++k)
        axis_labels.push_back(class_label(meta, k));
    axis_labels.push_back("invalid");
    for (int c = 0; c < meta.num_classes; ++c) {
        ordered_json e;
        e["class"] = c;
        e["name"] = class_label(meta, c);
        e["axis_labels"] = axis_labels;
        e["profiles"] = {{"real", profile_json(real.profiles[c])},
                         {"synthetic", profile_json(syn.profiles[c])}};
        ordered_json radar;
        if (real.profiles[c] && syn.profiles[c]) {
            const auto rs =
                radar_data({{"real", *real.profiles[c]},
                            {"synthetic", *syn.profiles[c]}},
                           axis_labels);
            ordered_json poly;
            for (const auto& [name, values] : rs.polylines)
                poly[name] = values;
            radar = std::move(poly);
        } else {
            radar = nullptr;
        }
        e["radar"] = std::move(radar);
        e["boxplots"] = {
            {"real", boxplots_json(real.boxplots[c], axis_labels)},
            {"synthetic", boxplots_json(syn.boxplots[c], axis_labels)}};
        ed_classes.push_back(std::move(e));
    }
    ed["classes"] = std::move(ed_classes);
    return ed;
}

ordered_json discriminator_json(std::span<const DiscriminatorResult> results_in,
                                std::span<const DiscriminatorSkip> skips,
                                bool ran, const ReportMeta& meta) {
    ordered_json disc;
    disc["ran"] = ran;
    ordered_json results = ordered_json::array();
    for (const auto& dr : results_in) {
        ordered_json d;
        d["class"] = dr.cls;
        d["name"] = class_label(meta, dr.cls);
        d["variant"] = segment_filter_name(dr.variant);
        d["target"] = domain_name(dr.target);
        d["accuracy"] = dr.accuracy;
        d["balanced_accuracy"] = dr.balanced_accuracy;
        d["majority_baseline"] = dr.majority_baseline;
        d["train_size"] = dr.train_size;
        d["test_size"] = dr.test_size;
        d["ruleset"] = ruleset_to_json(dr.ruleset);
        results.push_back(std::move(d));
    }
    disc["results"] = std::move(results);
    ordered_json skips_json = ordered_json::array();
    for (const auto& sk : skips) {
        ordered_json s;
        s["class"] = sk.cls;
        s["name"] = class_label(meta, sk.cls);
        s["variant"] = segment_filter_name(sk.variant);
        s["reason"] = sk.reason;
        skips_json.push_back(std::move(s));
    }
    disc["skipped"] = std::move(skips_json);
    return disc;
}

ordered_json build_report(const AnalysisResult& result,
                          const ReportMeta& meta) {
    ordered_json doc;
    doc["tool"] = {{"name", kToolName},
                   {"version", kToolVersion},
                   {"feature_registry", FeatureRegistry::version()}};
    doc["run"] = {{"seed", meta.seed}, {"config_hash", meta.config_hash}};

    ordered_json dataset;
    dataset["num_classes"] = meta.num_classes;
    ordered_json names = ordered_json::array();
    for (int c = 0; c < meta.num_classes; ++c)
        names.push_back(class_label(meta, c));
    dataset["class_names"] = std::move(names);
    dataset["ignore_label"] = kIgnoreLabel;
    dataset["sample_count"] = meta.sample_count;
    doc["dataset"] = std::move(dataset);

    doc["correlation"] =
        correlation_json(result.correlation, result.miou_series, meta);
    doc["error_distribution"] =
        errordist_json(result.errors_real, result.errors_syn, meta);

    ordered_json seg;
    seg["extracted"] = result.segments_extracted;
    if (!result.segments_extracted) {
        seg["skip_reason"] = result.segments_skip_reason;
    } else {
        std::size_t n_real = 0, n_syn = 0, n_err = 0;
        for (const auto& rec : result.records) {
            (rec.domain == DomainTag::Real ? n_real : n_syn) += 1;
            n_err += rec.is_error;
        }
        seg["records"] = result.records.size();
        seg["records_real"] = n_real;
        seg["records_synthetic"] = n_syn;
        seg["error_records"] = n_err;
        ordered_json fnames = ordered_json::array();
        for (auto name : FeatureRegistry::names())
            fnames.push_back(std::string(name));
        seg["feature_names"] = std::move(fnames);
    }
    doc["segments"] = std::move(seg);

    doc["discriminator"] = discriminator_json(
        result.discriminator_results, result.discriminator_skips,
        result.segments_extracted, meta);
    return doc;
}

void write_json(const std::filesystem::path& path, const ordered_json& doc) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) raise(ErrorCode::Io, "failed writing " + path.string());
}

ordered_json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorCode::MissingFile, "cannot open " + path.string());
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::CorruptFile, path.string() + ": " + e.what());
    }
    return doc;
}

}  // namespace segtransfer
