#include <cassert>
#include <cmath>
#include <limits>

#include "segtransfer/simd/kernels.hpp"

namespace segtransfer::simd::scalar {

MatchCounts match_counts(const std::uint8_t* pred, const std::uint8_t* gt,
                         std::size_t n, std::uint8_t cls, std::uint8_t ignore) {
    MatchCounts out;
    for (std::size_t i = 0; i < n; ++i) {
        const bool p = pred[i] == cls;
        const bool g = gt[i] == cls;
        out.intersection += p && g;
        out.union_count += (gt[i] != ignore) && (p || g);
    }
    return out;
}

void argmax_rows(const float* probs, std::size_t n_pixels, int num_classes,
                 std::uint8_t* out) {
    for (std::size_t i = 0; i < n_pixels; ++i) {
        const float* row = probs + i * num_classes;
        int best = 0;
        float best_v = row[0];
        for (int k = 1; k < num_classes; ++k) {
            if (row[k] > best_v) {  // strict: first occurrence wins ties
                best_v = row[k];
                best = k;
            }
        }
        out[i] = static_cast<std::uint8_t>(best);
    }
}

void dispersion_rows(const float* probs, std::size_t n_pixels, int num_classes,
                     float* entropy, float* margin, float* varratio) {
    assert(num_classes >= 2);
    const double inv_log_c = 1.0 / std::log(static_cast<double>(num_classes));
    for (std::size_t i = 0; i < n_pixels; ++i) {
        const float* row = probs + i * num_classes;
        // top-2 tracked in float so the margin matches the vector path
        // bit-for-bit
        float max1 = row[0];
        float max2 = -std::numeric_limits<float>::max();
        double plogp = 0.0;
        if (row[0] > 0.0f) plogp = static_cast<double>(row[0]) * std::log(static_cast<double>(row[0]));
        for (int k = 1; k < num_classes; ++k) {
            const float p = row[k];
            if (p > max1) {
                max2 = max1;
                max1 = p;
            } else if (p > max2) {
                max2 = p;
            }
            if (p > 0.0f) plogp += static_cast<double>(p) * std::log(static_cast<double>(p));
        }
        entropy[i] = static_cast<float>(-plogp * inv_log_c);
        margin[i] = 1.0f - (max1 - max2);
        varratio[i] = 1.0f - max1;
    }
}

}  // namespace segtransfer::simd::scalar

namespace segtransfer::simd {

void pair_histogram(const std::uint8_t* pred, const std::uint8_t* gt,
                    std::size_t n, int num_classes, std::uint8_t ignore,
                    std::int64_t* counts, std::int64_t* invalid) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t g = gt[i];
        if (g == ignore) continue;
        const std::uint8_t p = pred[i];
        if (p == ignore) {
            ++invalid[g];
        } else {
            ++counts[static_cast<std::size_t>(g) * num_classes + p];
        }
    }
}

}  // namespace segtransfer::simd
