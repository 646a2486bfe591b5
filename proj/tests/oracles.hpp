#pragma once

// Brute-force reference implementations used only by tests. They share no
// code with the library paths they check: plain double loops over pixels
// and textbook formulas.

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "segtransfer/raster.hpp"
#include "segtransfer/rng.hpp"

namespace oracles {

using segtransfer::kIgnoreLabel;
using segtransfer::LabelMask;
using segtransfer::Rng;

inline std::vector<std::vector<std::int64_t>> confusion_counts(
    const LabelMask& pred, const LabelMask& gt) {
    const int c = gt.num_classes();
    std::vector<std::vector<std::int64_t>> m(
        c, std::vector<std::int64_t>(c, 0));
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            const auto g = gt.at(x, y);
            const auto p = pred.at(x, y);
            if (g == kIgnoreLabel || p == kIgnoreLabel) continue;
            ++m[g][p];
        }
    }
    return m;
}

inline std::optional<double> iou_class(const LabelMask& pred,
                                       const LabelMask& gt, int cls) {
    std::int64_t inter = 0, uni = 0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            if (gt.at(x, y) == kIgnoreLabel) continue;
            const bool g = gt.at(x, y) == cls;
            const bool p = pred.at(x, y) == cls;
            inter += g && p;
            uni += g || p;
        }
    }
    if (uni == 0) return std::nullopt;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline std::optional<double> miou_image(const LabelMask& pred,
                                        const LabelMask& gt) {
    double sum = 0.0;
    int defined = 0;
    for (int c = 0; c < gt.num_classes(); ++c) {
        if (auto iou = iou_class(pred, gt, c)) {
            sum += *iou;
            ++defined;
        }
    }
    if (defined == 0) return std::nullopt;
    return sum / defined;
}

struct ErrorRow {
    double tp = 0.0;
    std::map<int, double> fn;
    double invalid = 0.0;
};

inline std::optional<ErrorRow> per_image_errors(const LabelMask& pred,
                                                const LabelMask& gt, int cls) {
    std::int64_t total = 0, tp = 0, invalid = 0;
    std::map<int, std::int64_t> fn;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            if (gt.at(x, y) != cls) continue;
            ++total;
            const auto p = pred.at(x, y);
            if (p == kIgnoreLabel)
                ++invalid;
            else if (p == cls)
                ++tp;
            else
                ++fn[p];
        }
    }
    if (total == 0) return std::nullopt;
    ErrorRow row;
    row.tp = static_cast<double>(tp) / static_cast<double>(total);
    row.invalid = static_cast<double>(invalid) / static_cast<double>(total);
    for (const auto& [k, v] : fn)
        row.fn[k] = static_cast<double>(v) / static_cast<double>(total);
    return row;
}

// Textbook one-pass Pearson: no centering, a deliberately different
// algebraic route than the library's two-pass form.
inline double pearson(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        syy += ys[i] * ys[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) /
           std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

inline LabelMask random_mask(Rng& rng, int w, int h, int num_classes,
                             double ignore_p = 0.0) {
    LabelMask mask(w, h, num_classes);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            mask.set(x, y,
                     rng.next_bool(ignore_p)
                         ? kIgnoreLabel
                         : static_cast<std::uint8_t>(
                               rng.next_below(num_classes)));
    return mask;
}

}  // namespace oracles
