// segtransfer CLI: dataset simulation, transferability analysis, and report
// rendering over the manifest + raster formats documented in the README.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "segtransfer/analysis.hpp"
#include "segtransfer/io/formats.hpp"
#include "segtransfer/report.hpp"
#include "segtransfer/rng.hpp"
#include "segtransfer/shiftsim.hpp"
#include "segtransfer/simd/kernels.hpp"
#include "segtransfer/svg_render.hpp"

namespace fs = std::filesystem;
using namespace segtransfer;
using ordered_json = nlohmann::ordered_json;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 42;
    std::size_t threads = 1;
    std::string config_path;
    std::string out;
    std::string write_default_config;
    bool force_scalar = false;
};

ToolConfig load_config(const GlobalOpts& g) {
    if (g.config_path.empty()) return ToolConfig{};
    return ToolConfig::from_ini(IniFile::parse_file(g.config_path));
}

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        raise(ErrorCode::Io, "cannot create output directory " + dir.string());
}

ReportMeta make_meta(const GlobalOpts& g, const ToolConfig& cfg,
                     const io::DatasetManifest& manifest) {
    ReportMeta meta;
    meta.seed = g.seed;
    meta.config_hash = cfg.config_hash();
    meta.num_classes = manifest.num_classes;
    meta.class_names = manifest.class_names;
    meta.sample_count = manifest.samples.size();
    return meta;
}

std::vector<std::string> generic_class_names(int num_classes) {
    std::vector<std::string> names;
    names.reserve(num_classes);
    for (int c = 0; c < num_classes; ++c)
        names.push_back("class_" + std::to_string(c));
    return names;
}

// --- simgen ---------------------------------------------------------------

int cmd_simgen(const GlobalOpts& g, std::size_t n) {
    ToolConfig cfg = load_config(g);
    if (n == 0) raise(ErrorCode::InvalidConfig, "simgen needs --n >= 1");
    cfg.scene.seed = derive_seed(g.seed, 0, "scene");
    const ShiftConfig shift =
        cfg.make_shift_config(derive_seed(g.seed, 0, "noise"));

    const fs::path out_dir =
        g.out.empty() ? fs::path("simgen_out") : fs::path(g.out);
    ensure_out_dir(out_dir);

    const auto samples = gen_paired_dataset(cfg.scene, shift, n);

    io::DatasetManifest manifest;
    manifest.num_classes = cfg.scene.num_classes;
    manifest.class_names = generic_class_names(cfg.scene.num_classes);
    for (const auto& s : samples) {
        io::ManifestEntry e;
        e.sample_id = s.sample_id;
        e.gt = s.sample_id + "_gt.png";
        e.pred_real = s.sample_id + "_real.png";
        e.pred_syn = s.sample_id + "_syn.png";
        e.prob_real = s.sample_id + "_real.prb1";
        e.prob_syn = s.sample_id + "_syn.prb1";
        io::write_label_png(out_dir / e.gt, s.gt);
        io::write_label_png(out_dir / e.pred_real, s.pred_real);
        io::write_label_png(out_dir / e.pred_syn, s.pred_syn);
        io::write_prb1(out_dir / *e.prob_real, *s.prob_real);
        io::write_prb1(out_dir / *e.prob_syn, *s.prob_syn);
        manifest.samples.push_back(std::move(e));
    }
    manifest.save(out_dir / "manifest.json");
    std::ofstream cfg_out(out_dir / "config.ini", std::ios::trunc);
    cfg_out << cfg.to_ini().serialize();

    std::printf("wrote %zu paired samples to %s (delta = %g%s)\n",
                samples.size(), out_dir.string().c_str(), cfg.shift_delta,
                cfg.shared_realization ? ", shared realization" : "");
    return 0;
}

// --- analyze and the narrower analysis subcommands -------------------------

void write_miou_series_csv(const fs::path& path, const ScoreSeries& series) {
    std::ofstream out(path, std::ios::trunc);
    out << "sample_id,miou_real,miou_syn\n";
    for (std::size_t i = 0; i < series.sample_ids.size(); ++i) {
        out << series.sample_ids[i] << ',';
        if (series.values_real[i]) out << *series.values_real[i];
        out << ',';
        if (series.values_syn[i]) out << *series.values_syn[i];
        out << '\n';
    }
}

int cmd_analyze(const GlobalOpts& g, const std::string& manifest_path) {
    const ToolConfig cfg = load_config(g);
    const auto manifest = io::DatasetManifest::load(manifest_path);
    const auto samples = io::load_dataset(manifest_path, g.threads);

    AnalyzeOptions opts;
    opts.config = cfg;
    opts.seed = g.seed;
    opts.threads = g.threads;
    const auto result = analyze_samples(samples, opts);
    const auto report = build_report(result, make_meta(g, cfg, manifest));

    const fs::path out_dir =
        g.out.empty() ? fs::path("analysis_out") : fs::path(g.out);
    ensure_out_dir(out_dir);
    write_json(out_dir / "report.json", report);
    write_miou_series_csv(out_dir / "series_miou.csv", result.miou_series);
    if (result.segments_extracted)
        io::write_segment_csv(out_dir / "segments.csv", result.records);

    std::printf("analyzed %zu samples (%d classes)\n", result.sample_count,
                result.num_classes);
    if (result.correlation.miou_r)
        std::printf("  miou correlation: r = %.4f over %lld pairs\n",
                    *result.correlation.miou_r,
                    static_cast<long long>(result.correlation.miou_pairs));
    else
        std::printf("  miou correlation: undefined\n");
    if (result.segments_extracted) {
        std::printf("  segment records: %zu\n", result.records.size());
        std::printf("  discriminator: %zu results, %zu skipped\n",
                    result.discriminator_results.size(),
                    result.discriminator_skips.size());
    } else {
        std::printf("  warning: discriminator skipped (%s)\n",
                    result.segments_skip_reason.c_str());
    }
    std::printf("report: %s\n", (out_dir / "report.json").string().c_str());
    return 0;
}

int cmd_correlate(const GlobalOpts& g, const std::string& manifest_path) {
    const ToolConfig cfg = load_config(g);
    const auto manifest = io::DatasetManifest::load(manifest_path);
    const auto samples = io::load_dataset(manifest_path, g.threads);
    CorrOptions corr = cfg.correlation;
    corr.threads = g.threads;
    const auto report = classwise_correlations(samples, corr);
    const auto series = build_series(samples, ClassScope::miou(), corr);
    const auto doc =
        correlation_json(report, series, make_meta(g, cfg, manifest));
    if (g.out.empty())
        std::cout << doc.dump(2) << '\n';
    else
        write_json(g.out, doc);
    return 0;
}

int cmd_errordist(const GlobalOpts& g, const std::string& manifest_path) {
    const ToolConfig cfg = load_config(g);
    const auto manifest = io::DatasetManifest::load(manifest_path);
    const auto samples = io::load_dataset(manifest_path, g.threads);
    const auto [real, syn] = error_analysis(samples, g.threads);
    const auto doc = errordist_json(real, syn, make_meta(g, cfg, manifest));
    if (g.out.empty())
        std::cout << doc.dump(2) << '\n';
    else
        write_json(g.out, doc);
    return 0;
}

int cmd_segments(const GlobalOpts& g, const std::string& manifest_path) {
    const ToolConfig cfg = load_config(g);
    const auto samples = io::load_dataset(manifest_path, g.threads);
    const auto records =
        extract_all_records(samples, cfg.segments, g.threads);
    const fs::path out =
        g.out.empty() ? fs::path("segments.csv") : fs::path(g.out);
    io::write_segment_csv(out, records);
    std::printf("wrote %zu segment records to %s\n", records.size(),
                out.string().c_str());
    return 0;
}

int cmd_rules(const GlobalOpts& g, const std::string& manifest_path,
              const std::string& segments_csv) {
    const ToolConfig cfg = load_config(g);
    std::vector<SegmentRecord> records;
    ReportMeta meta;
    meta.seed = g.seed;
    meta.config_hash = cfg.config_hash();
    if (!segments_csv.empty()) {
        records = io::read_segment_csv(segments_csv);
        int max_cls = -1;
        for (const auto& rec : records) max_cls = std::max(max_cls, rec.cls);
        meta.num_classes = max_cls + 1;
        meta.class_names = generic_class_names(meta.num_classes);
        meta.sample_count = 0;
    } else {
        const auto manifest = io::DatasetManifest::load(manifest_path);
        const auto samples = io::load_dataset(manifest_path, g.threads);
        records = extract_all_records(samples, cfg.segments, g.threads);
        meta = make_meta(g, cfg, manifest);
    }
    if (records.empty())
        raise(ErrorCode::EmptyDataset, "no segment records to learn from");

    RuleFitConfig rule_cfg = cfg.rules;
    rule_cfg.seed = derive_seed(g.seed, 0, "rules");
    const auto [results, skips] =
        run_all_discriminators(records, meta.num_classes, rule_cfg);
    const auto doc = discriminator_json(results, skips, true, meta);
    if (g.out.empty())
        std::cout << doc.dump(2) << '\n';
    else
        write_json(g.out, doc);
    return 0;
}

int cmd_render(const GlobalOpts& g, const std::string& report_path,
               const std::string& kind, const std::string& cls) {
    const auto report = read_json(report_path);
    if (kind != "scatter" && cls.empty())
        raise(ErrorCode::Usage, "--class is required for " + kind);
    const std::string svg = render_svg(report, kind, cls);
    if (g.out.empty()) raise(ErrorCode::Usage, "render needs --out <file.svg>");
    std::ofstream out(g.out, std::ios::trunc);
    if (!out) raise(ErrorCode::Io, "cannot open " + g.out + " for writing");
    out << svg;
    std::printf("wrote %s\n", g.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transferability analysis for semantic-segmentation testing "
                 "on paired real/synthetic data"};
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags are accepted after a subcommand too

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master seed for the run")
        ->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for per-image work")
        ->capture_default_str();
    app.add_option("--config", g.config_path, "INI config file");
    app.add_option("--out", g.out, "output directory or file");
    app.add_option("--write-default-config", g.write_default_config,
                   "write the reference config with every default and exit");
    app.add_flag("--no-simd", g.force_scalar,
                 "force the scalar reference kernels");

    std::size_t simgen_n = 0;
    auto* simgen = app.add_subcommand("simgen",
                                      "generate a paired dataset with a "
                                      "controllable domain shift");
    simgen->add_option("--n", simgen_n, "number of paired samples")
        ->required();

    std::string manifest_path;
    auto* analyze =
        app.add_subcommand("analyze", "run every analysis and write report.json");
    analyze->add_option("--manifest", manifest_path, "dataset manifest")
        ->required();
    auto* correlate = app.add_subcommand(
        "correlate", "per-class and mIoU correlation between the domains");
    correlate->add_option("--manifest", manifest_path, "dataset manifest")
        ->required();
    auto* errordist = app.add_subcommand(
        "errordist", "per-class error-distribution profiles and boxplots");
    errordist->add_option("--manifest", manifest_path, "dataset manifest")
        ->required();
    auto* segments = app.add_subcommand(
        "segments", "extract per-segment feature records to CSV");
    segments->add_option("--manifest", manifest_path, "dataset manifest")
        ->required();

    std::string segments_csv;
    auto* rules = app.add_subcommand(
        "rules", "learn real-vs-synthetic threshold rules per class");
    rules->add_option("--manifest", manifest_path, "dataset manifest");
    rules->add_option("--segments-csv", segments_csv,
                      "reuse a segment table instead of a manifest");

    std::string report_path, plot_kind, plot_class;
    auto* render =
        app.add_subcommand("render", "render a report series as a static SVG");
    render->add_option("--report", report_path, "report.json from analyze")
        ->required();
    render->add_option("--kind", plot_kind, "radar | boxplot | scatter")
        ->required();
    render->add_option("--class", plot_class, "class name or index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (g.force_scalar) simd::force_level(simd::Level::Scalar);
        if (!g.write_default_config.empty()) {
            std::ofstream out(g.write_default_config, std::ios::trunc);
            if (!out)
                raise(ErrorCode::Io,
                      "cannot open " + g.write_default_config + " for writing");
            out << ToolConfig{}.to_ini().serialize();
            std::printf("wrote %s\n", g.write_default_config.c_str());
            return 0;
        }
        if (simgen->parsed()) return cmd_simgen(g, simgen_n);
        if (analyze->parsed()) return cmd_analyze(g, manifest_path);
        if (correlate->parsed()) return cmd_correlate(g, manifest_path);
        if (errordist->parsed()) return cmd_errordist(g, manifest_path);
        if (segments->parsed()) return cmd_segments(g, manifest_path);
        if (rules->parsed()) {
            if (manifest_path.empty() && segments_csv.empty())
                raise(ErrorCode::Usage,
                      "rules needs --manifest or --segments-csv");
            return cmd_rules(g, manifest_path, segments_csv);
        }
        if (render->parsed())
            return cmd_render(g, report_path, plot_kind, plot_class);
        std::cout << app.help();
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", error_code_name(e.code()),
                     e.what());
        return (e.code() == ErrorCode::Usage ||
                e.code() == ErrorCode::InvalidConfig)
                   ? 2
                   : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
