#pragma once

#include <cstddef>
#include <cstdint>

namespace segtransfer::simd {

// Pixel-loop kernels used by the raster metrics. Every kernel has a scalar
// reference implementation; hot ones additionally have an AVX2 variant
// selected at runtime. The scalar implementations are the semantic
// definition — the vector variants are equivalence-tested against them
// (bit-exact for integer/compare kernels, toleranced for the entropy term).

enum class Level {
    Scalar,
    Avx2,
};

const char* level_name(Level level);

// Best level supported by this CPU.
Level detect_best();

// Level used by the dispatched kernels below. Defaults to detect_best().
Level active_level();

// Override the dispatch, e.g. to force the reference path. Throws
// ErrorCode::Domain if the CPU cannot run the requested level.
void force_level(Level level);

struct MatchCounts {
    std::int64_t intersection = 0;  // pred == cls && gt == cls
    std::int64_t union_count = 0;   // gt != ignore && (pred == cls || gt == cls)
};

// Per-class intersection/union tally over two label rasters.
MatchCounts match_counts(const std::uint8_t* pred, const std::uint8_t* gt,
                         std::size_t n, std::uint8_t cls, std::uint8_t ignore);

// Joint (gt, pred) histogram: counts[c * num_classes + k] for pred k in
// [0, C); invalid[c] tallies pred == ignore. Ground-truth ignore pixels are
// skipped entirely. Scatter-bound, so scalar only — no vector variant.
void pair_histogram(const std::uint8_t* pred, const std::uint8_t* gt,
                    std::size_t n, int num_classes, std::uint8_t ignore,
                    std::int64_t* counts, std::int64_t* invalid);

// Per-pixel argmax over class-fastest probability rows; ties break toward
// the lowest class index.
void argmax_rows(const float* probs, std::size_t n_pixels, int num_classes,
                 std::uint8_t* out);

// Per-pixel dispersion triple over class-fastest probability rows:
//   entropy   = -(1/ln C) * sum_k p_k ln p_k   (0 ln 0 := 0)
//   margin    = 1 - (p_max - p_second)
//   varratio  = 1 - p_max
// margin/varratio are exact float compares and match the scalar path
// bit-for-bit; the AVX2 entropy uses a polynomial log and agrees with the
// scalar path to ~1e-6 absolute.
void dispersion_rows(const float* probs, std::size_t n_pixels, int num_classes,
                     float* entropy, float* margin, float* varratio);

// Implementation tables; exposed so the equivalence tests can pin a level
// without mutating global dispatch.
namespace scalar {
MatchCounts match_counts(const std::uint8_t* pred, const std::uint8_t* gt,
                         std::size_t n, std::uint8_t cls, std::uint8_t ignore);
void argmax_rows(const float* probs, std::size_t n_pixels, int num_classes,
                 std::uint8_t* out);
void dispersion_rows(const float* probs, std::size_t n_pixels, int num_classes,
                     float* entropy, float* margin, float* varratio);
}  // namespace scalar

#if defined(SEGTRANSFER_HAVE_AVX2)
namespace avx2 {
MatchCounts match_counts(const std::uint8_t* pred, const std::uint8_t* gt,
                         std::size_t n, std::uint8_t cls, std::uint8_t ignore);
void argmax_rows(const float* probs, std::size_t n_pixels, int num_classes,
                 std::uint8_t* out);
void dispersion_rows(const float* probs, std::size_t n_pixels, int num_classes,
                     float* entropy, float* margin, float* varratio);
}  // namespace avx2
#endif

}  // namespace segtransfer::simd
