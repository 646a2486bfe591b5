// AVX2 variants of the pixel-loop kernels. Compiled with -mavx2 -mfma and
// reached only through the runtime dispatch table, so the rest of the
// library stays baseline-ISA clean.

#include <immintrin.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "segtransfer/simd/kernels.hpp"

namespace segtransfer::simd::avx2 {

namespace {

// Lane masks for a partial final block of `rem` floats (1..7).
inline __m256i tail_mask(int rem) {
    alignas(32) static const std::int32_t kMask[16] = {
        -1, -1, -1, -1, -1, -1, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0};
    return _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(kMask + (8 - rem)));
}

// Natural log, cephes-style: x = m * 2^e with m in [sqrt(0.5), sqrt(2)),
// degree-8 polynomial in (m - 1). Inputs are probabilities in (0, 1]; zeros
// are masked out by the caller. Relative error ~1e-7.
inline __m256 log_ps(__m256 x) {
    const __m256 one = _mm256_set1_ps(1.0f);
    const __m256 half = _mm256_set1_ps(0.5f);

    __m256i xi = _mm256_castps_si256(x);
    // exponent, unbiased against 126 so the mantissa lands in [0.5, 1)
    __m256i emm = _mm256_srli_epi32(xi, 23);
    emm = _mm256_sub_epi32(emm, _mm256_set1_epi32(126));
    __m256 e = _mm256_cvtepi32_ps(emm);

    // keep mantissa bits, force exponent to 2^-1
    xi = _mm256_and_si256(xi, _mm256_set1_epi32(0x007FFFFF));
    xi = _mm256_or_si256(xi, _mm256_set1_epi32(0x3F000000));
    __m256 mant = _mm256_castsi256_ps(xi);

    // if mantissa < sqrt(0.5): e -= 1, mant = 2 * mant
    const __m256 sqrthf = _mm256_set1_ps(0.707106781186547524f);
    __m256 lt = _mm256_cmp_ps(mant, sqrthf, _CMP_LT_OQ);
    e = _mm256_sub_ps(e, _mm256_and_ps(lt, one));
    mant = _mm256_add_ps(mant, _mm256_and_ps(lt, mant));
    mant = _mm256_sub_ps(mant, one);

    __m256 p = _mm256_set1_ps(7.0376836292e-2f);
    p = _mm256_fmadd_ps(p, mant, _mm256_set1_ps(-1.1514610310e-1f));
    p = _mm256_fmadd_ps(p, mant, _mm256_set1_ps(1.1676998740e-1f));
    p = _mm256_fmadd_ps(p, mant, _mm256_set1_ps(-1.2420140846e-1f));
    p = _mm256_fmadd_ps(p, mant, _mm256_set1_ps(1.4249322787e-1f));
    p = _mm256_fmadd_ps(p, mant, _mm256_set1_ps(-1.6668057665e-1f));
    p = _mm256_fmadd_ps(p, mant, _mm256_set1_ps(2.0000714765e-1f));
    p = _mm256_fmadd_ps(p, mant, _mm256_set1_ps(-2.4999993993e-1f));
    p = _mm256_fmadd_ps(p, mant, _mm256_set1_ps(3.3333331174e-1f));

    __m256 m2 = _mm256_mul_ps(mant, mant);
    __m256 m3 = _mm256_mul_ps(m2, mant);
    __m256 r = _mm256_mul_ps(p, m3);
    r = _mm256_fmadd_ps(e, _mm256_set1_ps(-2.12194440e-4f), r);
    r = _mm256_sub_ps(r, _mm256_mul_ps(half, m2));
    r = _mm256_add_ps(r, mant);
    r = _mm256_fmadd_ps(e, _mm256_set1_ps(0.693359375f), r);
    return r;
}

}  // namespace

MatchCounts match_counts(const std::uint8_t* pred, const std::uint8_t* gt,
                         std::size_t n, std::uint8_t cls, std::uint8_t ignore) {
    MatchCounts out;
    const __m256i vcls = _mm256_set1_epi8(static_cast<char>(cls));
    const __m256i vign = _mm256_set1_epi8(static_cast<char>(ignore));
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i vp = _mm256_loadu_si256(
            reinterpret_cast<const __m256i*>(pred + i));
        const __m256i vg = _mm256_loadu_si256(
            reinterpret_cast<const __m256i*>(gt + i));
        const __m256i pc = _mm256_cmpeq_epi8(vp, vcls);
        const __m256i gc = _mm256_cmpeq_epi8(vg, vcls);
        const __m256i gi = _mm256_cmpeq_epi8(vg, vign);
        const __m256i inter = _mm256_and_si256(pc, gc);
        const __m256i uni =
            _mm256_andnot_si256(gi, _mm256_or_si256(pc, gc));
        out.intersection += std::popcount(
            static_cast<std::uint32_t>(_mm256_movemask_epi8(inter)));
        out.union_count += std::popcount(
            static_cast<std::uint32_t>(_mm256_movemask_epi8(uni)));
    }
    for (; i < n; ++i) {
        const bool p = pred[i] == cls;
        const bool g = gt[i] == cls;
        out.intersection += p && g;
        out.union_count += (gt[i] != ignore) && (p || g);
    }
    return out;
}

void argmax_rows(const float* probs, std::size_t n_pixels, int num_classes,
                 std::uint8_t* out) {
    if (num_classes < 8) {
        scalar::argmax_rows(probs, n_pixels, num_classes, out);
        return;
    }
    const int blocks = num_classes / 8;
    const int rem = num_classes % 8;
    const __m256i lane_step = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
    const __m256 neg_inf = _mm256_set1_ps(-std::numeric_limits<float>::infinity());

    alignas(32) float vals[8];
    alignas(32) std::int32_t idxs[8];

    for (std::size_t i = 0; i < n_pixels; ++i) {
        const float* row = probs + i * num_classes;
        __m256 best_v = neg_inf;
        __m256i best_i = _mm256_setzero_si256();
        for (int b = 0; b < blocks; ++b) {
            const __m256 v = _mm256_loadu_ps(row + b * 8);
            const __m256i idx =
                _mm256_add_epi32(_mm256_set1_epi32(b * 8), lane_step);
            // strict greater keeps the earliest block on equal values
            const __m256 gt_mask = _mm256_cmp_ps(v, best_v, _CMP_GT_OQ);
            best_v = _mm256_blendv_ps(best_v, v, gt_mask);
            best_i = _mm256_blendv_epi8(best_i, idx,
                                        _mm256_castps_si256(gt_mask));
        }
        if (rem != 0) {
            const __m256i mask = tail_mask(rem);
            __m256 v = _mm256_maskload_ps(row + blocks * 8, mask);
            // dead lanes must never win
            v = _mm256_blendv_ps(neg_inf, v, _mm256_castsi256_ps(mask));
            const __m256i idx =
                _mm256_add_epi32(_mm256_set1_epi32(blocks * 8), lane_step);
            const __m256 gt_mask = _mm256_cmp_ps(v, best_v, _CMP_GT_OQ);
            best_v = _mm256_blendv_ps(best_v, v, gt_mask);
            best_i = _mm256_blendv_epi8(best_i, idx,
                                        _mm256_castps_si256(gt_mask));
        }
        _mm256_store_ps(vals, best_v);
        _mm256_store_si256(reinterpret_cast<__m256i*>(idxs), best_i);
        float bv = vals[0];
        std::int32_t bi = idxs[0];
        for (int l = 1; l < 8; ++l) {
            if (vals[l] > bv || (vals[l] == bv && idxs[l] < bi)) {
                bv = vals[l];
                bi = idxs[l];
            }
        }
        out[i] = static_cast<std::uint8_t>(bi);
    }
}

void dispersion_rows(const float* probs, std::size_t n_pixels, int num_classes,
                     float* entropy, float* margin, float* varratio) {
    if (num_classes < 8) {
        scalar::dispersion_rows(probs, n_pixels, num_classes, entropy, margin,
                                varratio);
        return;
    }
    const int blocks = num_classes / 8;
    const int rem = num_classes % 8;
    const float inv_log_c =
        static_cast<float>(1.0 / std::log(static_cast<double>(num_classes)));
    const __m256 zero = _mm256_setzero_ps();
    const __m256 lowest = _mm256_set1_ps(-std::numeric_limits<float>::max());

    alignas(32) float m1s[8];
    alignas(32) float m2s[8];

    for (std::size_t i = 0; i < n_pixels; ++i) {
        const float* row = probs + i * num_classes;
        __m256 vmax1 = lowest;
        __m256 vmax2 = lowest;
        __m256 acc = zero;
        for (int b = 0; b <= blocks; ++b) {
            __m256 v;
            if (b < blocks) {
                v = _mm256_loadu_ps(row + b * 8);
            } else {
                if (rem == 0) break;
                const __m256i mask = tail_mask(rem);
                v = _mm256_maskload_ps(row + blocks * 8, mask);
                // dead lanes pinned to lowest: never in the top-2 and
                // excluded from p ln p by the positivity mask below
                v = _mm256_blendv_ps(lowest, v, _mm256_castsi256_ps(mask));
            }
            // per-lane top-2
            const __m256 lo = _mm256_min_ps(vmax1, v);
            vmax1 = _mm256_max_ps(vmax1, v);
            vmax2 = _mm256_max_ps(vmax2, lo);
            // p ln p with zero (and dead) lanes masked out
            const __m256 pos = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
            const __m256 safe = _mm256_blendv_ps(_mm256_set1_ps(1.0f), v, pos);
            const __m256 term = _mm256_mul_ps(v, log_ps(safe));
            acc = _mm256_add_ps(acc, _mm256_and_ps(term, pos));
        }
        // horizontal sum of p ln p
        __m128 s = _mm_add_ps(_mm256_castps256_ps128(acc),
                              _mm256_extractf128_ps(acc, 1));
        s = _mm_add_ps(s, _mm_movehl_ps(s, s));
        s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 1));
        const float plogp = _mm_cvtss_f32(s);

        // global top-2 lives in the union of per-lane top-2 pairs
        _mm256_store_ps(m1s, vmax1);
        _mm256_store_ps(m2s, vmax2);
        float max1 = -std::numeric_limits<float>::max();
        float max2 = -std::numeric_limits<float>::max();
        for (int l = 0; l < 8; ++l) {
            if (m1s[l] > max1) {
                max2 = max1;
                max1 = m1s[l];
            } else if (m1s[l] > max2) {
                max2 = m1s[l];
            }
            if (m2s[l] > max2) max2 = m2s[l];  // m2s[l] <= m1s[l] <= max1 here
        }

        entropy[i] = -plogp * inv_log_c;
        margin[i] = 1.0f - (max1 - max2);
        varratio[i] = 1.0f - max1;
    }
}

}  // namespace segtransfer::simd::avx2
