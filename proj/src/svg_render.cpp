#include "segtransfer/svg_render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "segtransfer/errors.hpp"

namespace segtransfer {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr const char* kRealColor = "#1f77b4";
constexpr const char* kSynColor = "#d62728";

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// the exact serialization the report itself uses
std::string verbatim(const ordered_json& number) { return number.dump(); }

const ordered_json& class_entry(const ordered_json& report,
                                const std::string& cls) {
    const auto& classes = report.at("error_distribution").at("classes");
    for (const auto& entry : classes) {
        if (entry.at("name").get<std::string>() == cls ||
            std::to_string(entry.at("class").get<int>()) == cls)
            return entry;
    }
    raise(ErrorCode::Usage, "report has no class " + cls);
}

void open_svg(std::ostringstream& out, int w, int h) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
        << "\">\n"
        << "<rect width=\"" << w << "\" height=\"" << h
        << "\" fill=\"white\"/>\n";
}

void text_at(std::ostringstream& out, double x, double y,
             const std::string& s, const char* anchor = "start",
             int size = 12, const char* fill = "#333") {
    out << "<text x=\"" << coord(x) << "\" y=\"" << coord(y)
        << "\" font-family=\"sans-serif\" font-size=\"" << size
        << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill << "\">" << s
        << "</text>\n";
}

void legend(std::ostringstream& out, double x, double y) {
    out << "<rect x=\"" << coord(x) << "\" y=\"" << coord(y)
        << "\" width=\"14\" height=\"14\" fill=\"" << kRealColor << "\"/>\n";
    text_at(out, x + 20, y + 12, "real");
    out << "<rect x=\"" << coord(x) << "\" y=\"" << coord(y + 20)
        << "\" width=\"14\" height=\"14\" fill=\"" << kSynColor << "\"/>\n";
    text_at(out, x + 20, y + 32, "synthetic");
}

}  // namespace

std::string render_radar(const ordered_json& report, const std::string& cls) {
    const auto& entry = class_entry(report, cls);
    const auto& radar = entry.at("radar");
    if (radar.is_null())
        raise(ErrorCode::Usage,
              "no radar data for class " + cls +
                  " (one domain has no contributing images)");
    const auto labels =
        entry.at("axis_labels").get<std::vector<std::string>>();
    const std::size_t n_axes = labels.size();

    const int size = 640;
    const double cx = size / 2.0, cy = size / 2.0, radius = 230.0;
    auto point = [&](std::size_t axis, double value) {
        const double angle =
            -kPi / 2.0 + 2.0 * kPi * static_cast<double>(axis) /
                             static_cast<double>(n_axes);
        return std::pair<double, double>(cx + radius * value * std::cos(angle),
                                         cy + radius * value * std::sin(angle));
    };

    std::ostringstream out;
    open_svg(out, size, size + 40);
    text_at(out, cx, 24, "error profile: " + entry.at("name").get<std::string>(),
            "middle", 16);

    for (double ring : {0.25, 0.5, 0.75, 1.0}) {
        out << "<polygon points=\"";
        for (std::size_t a = 0; a < n_axes; ++a) {
            const auto [x, y] = point(a, ring);
            out << coord(x) << ',' << coord(y) << ' ';
        }
        out << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
    }
    for (std::size_t a = 0; a < n_axes; ++a) {
        const auto [x, y] = point(a, 1.0);
        out << "<line x1=\"" << coord(cx) << "\" y1=\"" << coord(cy)
            << "\" x2=\"" << coord(x) << "\" y2=\"" << coord(y)
            << "\" stroke=\"#ccc\"/>\n";
        const auto [lx, ly] = point(a, 1.12);
        text_at(out, lx, ly, labels[a], "middle", 11);
    }

    for (const auto& [domain, color] :
         {std::pair<const char*, const char*>{"real", kRealColor},
          {"synthetic", kSynColor}}) {
        const auto values = radar.at(domain).get<std::vector<double>>();
        out << "<polygon points=\"";
        for (std::size_t a = 0; a < values.size(); ++a) {
            const auto [x, y] = point(a, std::clamp(values[a], 0.0, 1.0));
            out << coord(x) << ',' << coord(y) << ' ';
        }
        out << "\" fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\""
            << color << "\" stroke-width=\"2\"/>\n";
        // vertex values, verbatim from the report
        for (std::size_t a = 0; a < values.size(); ++a) {
            const auto [x, y] = point(a, std::clamp(values[a], 0.0, 1.0));
            text_at(out, x + 4, y - 4, verbatim(radar.at(domain).at(a)),
                    "start", 9, color);
        }
    }
    legend(out, 20.0, size - 10.0);
    out << "</svg>\n";
    return out.str();
}

std::string render_boxplot(const ordered_json& report,
                           const std::string& cls) {
    const auto& entry = class_entry(report, cls);
    const auto& boxes = entry.at("boxplots");
    if (boxes.at("real").is_null() && boxes.at("synthetic").is_null())
        raise(ErrorCode::Usage, "no boxplot data for class " + cls);
    const auto labels =
        entry.at("axis_labels").get<std::vector<std::string>>();
    const std::size_t n_axes = labels.size();

    const int width = static_cast<int>(80 + n_axes * 64);
    const int height = 420;
    const double plot_x = 60, plot_y = 50, plot_h = 300;
    auto y_of = [&](double v) { return plot_y + plot_h * (1.05 - v) / 1.05; };

    std::ostringstream out;
    open_svg(out, width, height);
    text_at(out, width / 2.0, 24,
            "per-image error scores: " + entry.at("name").get<std::string>(),
            "middle", 16);
    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        out << "<line x1=\"" << coord(plot_x) << "\" y1=\"" << coord(y_of(tick))
            << "\" x2=\"" << coord(width - 20.0) << "\" y2=\""
            << coord(y_of(tick)) << "\" stroke=\"#eee\"/>\n";
        text_at(out, plot_x - 8, y_of(tick) + 4, coord(tick), "end", 10);
    }

    auto draw_box = [&](double x, const ordered_json& b, const char* color) {
        const double bw = 18;
        const double q1 = b.at("q1").get<double>();
        const double q3 = b.at("q3").get<double>();
        const double med = b.at("median").get<double>();
        const double lo = b.at("min").get<double>();
        const double hi = b.at("max").get<double>();
        out << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(y_of(lo))
            << "\" x2=\"" << coord(x) << "\" y2=\"" << coord(y_of(hi))
            << "\" stroke=\"" << color << "\"/>\n";
        out << "<rect x=\"" << coord(x - bw / 2) << "\" y=\"" << coord(y_of(q3))
            << "\" width=\"" << coord(bw) << "\" height=\""
            << coord(std::max(0.5, y_of(q1) - y_of(q3))) << "\" fill=\""
            << color << "\" fill-opacity=\"0.25\" stroke=\"" << color
            << "\"/>\n";
        out << "<line x1=\"" << coord(x - bw / 2) << "\" y1=\""
            << coord(y_of(med)) << "\" x2=\"" << coord(x + bw / 2)
            << "\" y2=\"" << coord(y_of(med)) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        for (const auto& o : b.at("outliers"))
            out << "<circle cx=\"" << coord(x) << "\" cy=\""
                << coord(y_of(o.get<double>())) << "\" r=\"2.5\" fill=\"none\""
                << " stroke=\"" << color << "\"/>\n";
    };

    for (std::size_t a = 0; a < n_axes; ++a) {
        const double slot_x = plot_x + 30 + static_cast<double>(a) * 64;
        text_at(out, slot_x, plot_y + plot_h + 18, labels[a], "middle", 10);
        if (!boxes.at("real").is_null())
            draw_box(slot_x - 11, boxes.at("real").at(a), kRealColor);
        if (!boxes.at("synthetic").is_null())
            draw_box(slot_x + 11, boxes.at("synthetic").at(a), kSynColor);
    }
    legend(out, 20.0, height - 46.0);
    out << "</svg>\n";
    return out.str();
}

std::string render_scatter(const ordered_json& report) {
    const auto& corr = report.at("correlation");
    const auto& series = corr.at("series");
    const auto& real = series.at("miou_real");
    const auto& syn = series.at("miou_syn");

    const int size = 520;
    const double plot_x = 60, plot_y = 40, plot_w = 420, plot_h = 420;
    auto x_of = [&](double v) { return plot_x + plot_w * v; };
    auto y_of = [&](double v) { return plot_y + plot_h * (1.0 - v); };

    std::ostringstream out;
    open_svg(out, size, size + 40);
    text_at(out, size / 2.0, 24, "per-image mIoU: real vs synthetic", "middle",
            16);
    out << "<rect x=\"" << coord(plot_x) << "\" y=\"" << coord(plot_y)
        << "\" width=\"" << coord(plot_w) << "\" height=\"" << coord(plot_h)
        << "\" fill=\"none\" stroke=\"#999\"/>\n";
    out << "<line x1=\"" << coord(x_of(0)) << "\" y1=\"" << coord(y_of(0))
        << "\" x2=\"" << coord(x_of(1)) << "\" y2=\"" << coord(y_of(1))
        << "\" stroke=\"#ccc\" stroke-dasharray=\"4 3\"/>\n";
    for (double tick : {0.0, 0.5, 1.0}) {
        text_at(out, x_of(tick), plot_y + plot_h + 16, coord(tick), "middle",
                10);
        text_at(out, plot_x - 6, y_of(tick) + 4, coord(tick), "end", 10);
    }
    text_at(out, plot_x + plot_w / 2, size + 28, "mIoU (real)", "middle", 12);

    for (std::size_t i = 0; i < real.size(); ++i) {
        if (real.at(i).is_null() || syn.at(i).is_null()) continue;
        out << "<circle cx=\"" << coord(x_of(real.at(i).get<double>()))
            << "\" cy=\"" << coord(y_of(syn.at(i).get<double>()))
            << "\" r=\"3\" fill=\"" << kRealColor
            << "\" fill-opacity=\"0.6\"/>\n";
    }

    const auto& miou = corr.at("miou");
    std::string annotation;
    if (miou.at("r").is_null())
        annotation = "r undefined (" + miou.at("status").get<std::string>() +
                     ", pairs = " + verbatim(miou.at("pairs")) + ")";
    else
        annotation = "r = " + verbatim(miou.at("r")) +
                     " (pairs = " + verbatim(miou.at("pairs")) + ")";
    text_at(out, plot_x + 10, plot_y + 20, annotation, "start", 13, "#000");
    out << "</svg>\n";
    return out.str();
}

std::string render_svg(const ordered_json& report, const std::string& kind,
                       const std::string& cls) {
    if (kind == "radar") return render_radar(report, cls);
    if (kind == "boxplot") return render_boxplot(report, cls);
    if (kind == "scatter") return render_scatter(report);
    raise(ErrorCode::Usage,
          "unknown plot kind '" + kind + "' (radar|boxplot|scatter)");
}

}  // namespace segtransfer
