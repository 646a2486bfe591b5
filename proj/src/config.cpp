#include "segtransfer/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "segtransfer/rng.hpp"

namespace segtransfer {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

IniFile IniFile::parse_string(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                raise(ErrorCode::InvalidConfig,
                      "config line " + std::to_string(line_no) +
                          ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            ini.sections_[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            raise(ErrorCode::InvalidConfig,
                  "config line " + std::to_string(line_no) +
                      ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            raise(ErrorCode::InvalidConfig,
                  "config line " + std::to_string(line_no) + ": empty key");
        ini.sections_[section][key] = value;
    }
    return ini;
}

IniFile IniFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorCode::MissingFile, "cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section,
                         const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end() || s->second.count(key) == 0)
        raise(ErrorCode::InvalidConfig,
              "missing config key [" + section + "] " + key);
    return s->second.at(key);
}

void IniFile::set(const std::string& section, const std::string& key,
                  const std::string& value) {
    sections_[section][key] = value;
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        raise(ErrorCode::InvalidConfig,
              "config [" + section + "] " + key + ": not a number: " + v);
    }
}

int IniFile::get_int(const std::string& section, const std::string& key,
                     int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    try {
        std::size_t pos = 0;
        const long val = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(val);
    } catch (const std::exception&) {
        raise(ErrorCode::InvalidConfig,
              "config [" + section + "] " + key + ": not an integer: " + v);
    }
}

std::uint64_t IniFile::get_u64(const std::string& section,
                               const std::string& key,
                               std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    try {
        std::size_t pos = 0;
        const unsigned long long val = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return val;
    } catch (const std::exception&) {
        raise(ErrorCode::InvalidConfig,
              "config [" + section + "] " + key + ": not an integer: " + v);
    }
}

bool IniFile::get_bool(const std::string& section, const std::string& key,
                       bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    raise(ErrorCode::InvalidConfig,
          "config [" + section + "] " + key + ": not a boolean: " + v);
}

std::string IniFile::serialize() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, keys] : sections_) {
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& [key, value] : keys)
            out << key << " = " << value << '\n';
    }
    return out.str();
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

NoiseParams noise_from_ini(const IniFile& ini, const std::string& section,
                           const NoiseParams& defaults) {
    NoiseParams p = defaults;
    p.temperature = ini.get_double(section, "temperature", p.temperature);
    p.boundary_jitter =
        ini.get_double(section, "boundary_jitter", p.boundary_jitter);
    p.blob_rate = ini.get_double(section, "blob_rate", p.blob_rate);
    p.blob_min = ini.get_double(section, "blob_min", p.blob_min);
    p.blob_max = ini.get_double(section, "blob_max", p.blob_max);
    p.confusion_epsilon =
        ini.get_double(section, "confusion_epsilon", p.confusion_epsilon);
    p.confusion_focus_class =
        ini.get_int(section, "confusion_focus_class", p.confusion_focus_class);
    p.confusion_focus_share = ini.get_double(section, "confusion_focus_share",
                                             p.confusion_focus_share);
    return p;
}

void noise_to_ini(IniFile& ini, const std::string& section,
                  const NoiseParams& p) {
    ini.set(section, "temperature", fmt_double(p.temperature));
    ini.set(section, "boundary_jitter", fmt_double(p.boundary_jitter));
    ini.set(section, "blob_rate", fmt_double(p.blob_rate));
    ini.set(section, "blob_min", fmt_double(p.blob_min));
    ini.set(section, "blob_max", fmt_double(p.blob_max));
    ini.set(section, "confusion_epsilon", fmt_double(p.confusion_epsilon));
    ini.set(section, "confusion_focus_class",
            std::to_string(p.confusion_focus_class));
    ini.set(section, "confusion_focus_share",
            fmt_double(p.confusion_focus_share));
}

const char* const kKnownKeys[][2] = {
    {"scene", "width"}, {"scene", "height"}, {"scene", "num_classes"},
    {"scene", "shapes_min"}, {"scene", "shapes_max"},
    {"scene", "rectangles"}, {"scene", "ellipses"},
    {"noise.real", "temperature"}, {"noise.real", "boundary_jitter"},
    {"noise.real", "blob_rate"}, {"noise.real", "blob_min"},
    {"noise.real", "blob_max"}, {"noise.real", "confusion_epsilon"},
    {"noise.real", "confusion_focus_class"},
    {"noise.real", "confusion_focus_share"},
    {"noise.shifted", "temperature"}, {"noise.shifted", "boundary_jitter"},
    {"noise.shifted", "blob_rate"}, {"noise.shifted", "blob_min"},
    {"noise.shifted", "blob_max"}, {"noise.shifted", "confusion_epsilon"},
    {"noise.shifted", "confusion_focus_class"},
    {"noise.shifted", "confusion_focus_share"},
    {"shift", "delta"}, {"shift", "shared_realization"},
    {"correlation", "min_pairs"}, {"correlation", "fp_only_as_zero"},
    {"correlation", "spearman"},
    {"segments", "iou_mode"},
    {"rules", "n_estimators"}, {"rules", "row_subsample"},
    {"rules", "feature_subsample"}, {"rules", "max_depth"},
    {"rules", "precision_min"}, {"rules", "recall_min"}, {"rules", "top_k"},
    {"rules", "split_fraction"},
};

void reject_unknown_keys(const IniFile& ini) {
    for (const auto& [section, keys] : ini.sections()) {
        for (const auto& [key, value] : keys) {
            bool known = false;
            for (const auto& k : kKnownKeys)
                if (section == k[0] && key == k[1]) {
                    known = true;
                    break;
                }
            if (!known)
                raise(ErrorCode::InvalidConfig,
                      "unknown config key [" + section + "] " + key);
        }
    }
}

}  // namespace

ToolConfig ToolConfig::from_ini(const IniFile& ini) {
    reject_unknown_keys(ini);
    ToolConfig cfg;
    cfg.scene.width = ini.get_int("scene", "width", cfg.scene.width);
    cfg.scene.height = ini.get_int("scene", "height", cfg.scene.height);
    cfg.scene.num_classes =
        ini.get_int("scene", "num_classes", cfg.scene.num_classes);
    cfg.scene.shapes_min =
        ini.get_int("scene", "shapes_min", cfg.scene.shapes_min);
    cfg.scene.shapes_max =
        ini.get_int("scene", "shapes_max", cfg.scene.shapes_max);
    cfg.scene.rectangles =
        ini.get_bool("scene", "rectangles", cfg.scene.rectangles);
    cfg.scene.ellipses = ini.get_bool("scene", "ellipses", cfg.scene.ellipses);

    cfg.noise_real = noise_from_ini(ini, "noise.real", cfg.noise_real);
    cfg.noise_shifted = noise_from_ini(ini, "noise.shifted", cfg.noise_shifted);
    cfg.shift_delta = ini.get_double("shift", "delta", cfg.shift_delta);
    cfg.shared_realization =
        ini.get_bool("shift", "shared_realization", cfg.shared_realization);

    cfg.correlation.min_pairs =
        ini.get_int("correlation", "min_pairs", cfg.correlation.min_pairs);
    cfg.correlation.fp_only_as_zero = ini.get_bool(
        "correlation", "fp_only_as_zero", cfg.correlation.fp_only_as_zero);
    cfg.correlation.with_spearman =
        ini.get_bool("correlation", "spearman", cfg.correlation.with_spearman);

    if (ini.has("segments", "iou_mode")) {
        const std::string mode = ini.get("segments", "iou_mode");
        if (mode == "adjusted")
            cfg.segments.iou_mode = SegmentIouMode::Adjusted;
        else if (mode == "full_class")
            cfg.segments.iou_mode = SegmentIouMode::FullClass;
        else
            raise(ErrorCode::InvalidConfig,
                  "segments.iou_mode must be adjusted or full_class");
    }

    cfg.rules.n_estimators =
        ini.get_int("rules", "n_estimators", cfg.rules.n_estimators);
    cfg.rules.row_subsample =
        ini.get_double("rules", "row_subsample", cfg.rules.row_subsample);
    cfg.rules.feature_subsample = ini.get_double("rules", "feature_subsample",
                                                 cfg.rules.feature_subsample);
    cfg.rules.max_depth = ini.get_int("rules", "max_depth", cfg.rules.max_depth);
    cfg.rules.precision_min =
        ini.get_double("rules", "precision_min", cfg.rules.precision_min);
    cfg.rules.recall_min =
        ini.get_double("rules", "recall_min", cfg.rules.recall_min);
    cfg.rules.top_k = ini.get_int("rules", "top_k", cfg.rules.top_k);
    cfg.rules.split_fraction =
        ini.get_double("rules", "split_fraction", cfg.rules.split_fraction);
    return cfg;
}

IniFile ToolConfig::to_ini() const {
    IniFile ini;
    ini.set("scene", "width", std::to_string(scene.width));
    ini.set("scene", "height", std::to_string(scene.height));
    ini.set("scene", "num_classes", std::to_string(scene.num_classes));
    ini.set("scene", "shapes_min", std::to_string(scene.shapes_min));
    ini.set("scene", "shapes_max", std::to_string(scene.shapes_max));
    ini.set("scene", "rectangles", scene.rectangles ? "true" : "false");
    ini.set("scene", "ellipses", scene.ellipses ? "true" : "false");
    noise_to_ini(ini, "noise.real", noise_real);
    noise_to_ini(ini, "noise.shifted", noise_shifted);
    ini.set("shift", "delta", fmt_double(shift_delta));
    ini.set("shift", "shared_realization",
            shared_realization ? "true" : "false");
    ini.set("correlation", "min_pairs",
            std::to_string(correlation.min_pairs));
    ini.set("correlation", "fp_only_as_zero",
            correlation.fp_only_as_zero ? "true" : "false");
    ini.set("correlation", "spearman",
            correlation.with_spearman ? "true" : "false");
    ini.set("segments", "iou_mode",
            segments.iou_mode == SegmentIouMode::Adjusted ? "adjusted"
                                                          : "full_class");
    ini.set("rules", "n_estimators", std::to_string(rules.n_estimators));
    ini.set("rules", "row_subsample", fmt_double(rules.row_subsample));
    ini.set("rules", "feature_subsample", fmt_double(rules.feature_subsample));
    ini.set("rules", "max_depth", std::to_string(rules.max_depth));
    ini.set("rules", "precision_min", fmt_double(rules.precision_min));
    ini.set("rules", "recall_min", fmt_double(rules.recall_min));
    ini.set("rules", "top_k", std::to_string(rules.top_k));
    ini.set("rules", "split_fraction", fmt_double(rules.split_fraction));
    return ini;
}

ShiftConfig ToolConfig::make_shift_config(std::uint64_t master_seed) const {
    ShiftConfig shift;
    shift.base = noise_real.materialize(scene.num_classes, master_seed);
    shift.shifted = noise_shifted.materialize(scene.num_classes, master_seed);
    shift.delta = shift_delta;
    shift.shared_realization = shared_realization;
    return shift;
}

std::string ToolConfig::config_hash() const {
    const std::uint64_t h = fnv1a64(to_ini().serialize());
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

}  // namespace segtransfer
