#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "segtransfer/io/formats.hpp"
#include "segtransfer/parallel.hpp"

namespace segtransfer::io {

using ordered_json = nlohmann::ordered_json;

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorCode::MissingFile, "cannot open manifest " + path.string());
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::CorruptFile,
              "manifest " + path.string() + ": " + e.what());
    }
    DatasetManifest m;
    try {
        m.version = doc.at("version").get<int>();
        m.num_classes = doc.at("num_classes").get<int>();
        m.ignore_label = doc.value("ignore_label", 255);
        if (doc.contains("class_names"))
            m.class_names = doc["class_names"].get<std::vector<std::string>>();
        for (const auto& entry : doc.at("samples")) {
            ManifestEntry e;
            e.sample_id = entry.at("sample_id").get<std::string>();
            e.gt = entry.at("gt").get<std::string>();
            e.pred_real = entry.at("pred_real").get<std::string>();
            e.pred_syn = entry.at("pred_syn").get<std::string>();
            if (entry.contains("prob_real"))
                e.prob_real = entry["prob_real"].get<std::string>();
            if (entry.contains("prob_syn"))
                e.prob_syn = entry["prob_syn"].get<std::string>();
            m.samples.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::CorruptFile,
              "manifest " + path.string() + ": " + e.what());
    }
    if (m.num_classes < 1 || m.num_classes > 254)
        raise(ErrorCode::InvalidConfig, "manifest num_classes out of range");
    if (m.ignore_label != kIgnoreLabel)
        raise(ErrorCode::InvalidConfig,
              "this build fixes the ignore label at 255; manifest says " +
                  std::to_string(m.ignore_label));
    std::unordered_set<std::string> ids;
    for (const auto& e : m.samples)
        if (!ids.insert(e.sample_id).second)
            raise(ErrorCode::InvalidConfig,
                  "duplicate sample_id " + e.sample_id);
    return m;
}

void DatasetManifest::save(const std::filesystem::path& path) const {
    ordered_json doc;
    doc["version"] = version;
    doc["num_classes"] = num_classes;
    doc["ignore_label"] = ignore_label;
    doc["class_names"] = class_names;
    ordered_json samples_json = ordered_json::array();
    for (const auto& e : samples) {
        ordered_json entry;
        entry["sample_id"] = e.sample_id;
        entry["gt"] = e.gt;
        entry["pred_real"] = e.pred_real;
        entry["pred_syn"] = e.pred_syn;
        if (e.prob_real) entry["prob_real"] = *e.prob_real;
        if (e.prob_syn) entry["prob_syn"] = *e.prob_syn;
        samples_json.push_back(std::move(entry));
    }
    doc["samples"] = std::move(samples_json);

    std::ofstream out(path, std::ios::trunc);
    if (!out)
        raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) raise(ErrorCode::Io, "failed writing " + path.string());
}

std::vector<PairedSample> load_dataset(
    const std::filesystem::path& manifest_path, std::size_t threads) {
    const DatasetManifest manifest = DatasetManifest::load(manifest_path);
    if (manifest.samples.empty())
        raise(ErrorCode::EmptyDataset, "manifest lists no samples");
    const auto base = manifest_path.parent_path();

    auto resolve = [&](const std::string& rel) { return base / rel; };
    auto require_exists = [&](const std::filesystem::path& p) {
        if (!std::filesystem::exists(p))
            raise(ErrorCode::MissingFile, "missing file " + p.string());
    };

    std::vector<PairedSample> samples(manifest.samples.size());
    parallel_for(manifest.samples.size(), threads, [&](std::size_t i) {
        const auto& e = manifest.samples[i];
        PairedSample s;
        s.sample_id = e.sample_id;
        for (const auto* rel : {&e.gt, &e.pred_real, &e.pred_syn})
            require_exists(resolve(*rel));
        s.gt = read_label_png(resolve(e.gt), manifest.num_classes);
        s.pred_real = read_label_png(resolve(e.pred_real), manifest.num_classes);
        s.pred_syn = read_label_png(resolve(e.pred_syn), manifest.num_classes);
        if (e.prob_real) {
            require_exists(resolve(*e.prob_real));
            s.prob_real = read_prb1(resolve(*e.prob_real));
        }
        if (e.prob_syn) {
            require_exists(resolve(*e.prob_syn));
            s.prob_syn = read_prb1(resolve(*e.prob_syn));
        }
        s.validate();  // congruence, ranges, argmax consistency
        samples[i] = std::move(s);
    });
    return samples;
}

}  // namespace segtransfer::io
