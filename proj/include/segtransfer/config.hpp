#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "segtransfer/paircorr.hpp"
#include "segtransfer/rules.hpp"
#include "segtransfer/segments.hpp"
#include "segtransfer/shiftsim.hpp"

namespace segtransfer {

// INI-style key-value file with one section per module. Unknown keys are
// rejected by ToolConfig so typos do not silently fall back to defaults.
class IniFile {
public:
    static IniFile parse_file(const std::filesystem::path& path);
    static IniFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    void set(const std::string& section, const std::string& key,
             const std::string& value);

    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    int get_int(const std::string& section, const std::string& key,
                int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const;

    // canonical text: sections and keys in sorted order
    std::string serialize() const;

    const std::map<std::string, std::map<std::string, std::string>>& sections()
        const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Every tunable of the toolkit with its default. The reference config
// (ToolConfig{}.to_ini()) lists them all.
struct ToolConfig {
    SceneConfig scene;
    NoiseParams noise_real = NoiseParams::default_real();
    NoiseParams noise_shifted = NoiseParams::default_shifted();
    double shift_delta = 0.0;
    bool shared_realization = false;
    CorrOptions correlation;
    SegmentExtractOptions segments;
    RuleFitConfig rules;

    static ToolConfig from_ini(const IniFile& ini);
    IniFile to_ini() const;

    ShiftConfig make_shift_config(std::uint64_t master_seed) const;

    // FNV-1a of the canonical serialization; recorded in reports.
    std::string config_hash() const;
};

}  // namespace segtransfer
