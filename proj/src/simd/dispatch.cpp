#include <atomic>

#include "segtransfer/errors.hpp"
#include "segtransfer/simd/kernels.hpp"

namespace segtransfer::simd {

namespace {

Level detect_impl() {
#if defined(SEGTRANSFER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return Level::Avx2;
#endif
    return Level::Scalar;
}

std::atomic<Level> g_level{detect_impl()};

}  // namespace

const char* level_name(Level level) {
    switch (level) {
        case Level::Scalar: return "scalar";
        case Level::Avx2: return "avx2";
    }
    return "?";
}

Level detect_best() { return detect_impl(); }

Level active_level() { return g_level.load(std::memory_order_relaxed); }

void force_level(Level level) {
    if (level == Level::Avx2 && detect_impl() != Level::Avx2)
        raise(ErrorCode::Domain, "avx2 kernels not available on this CPU");
    g_level.store(level, std::memory_order_relaxed);
}

MatchCounts match_counts(const std::uint8_t* pred, const std::uint8_t* gt,
                         std::size_t n, std::uint8_t cls, std::uint8_t ignore) {
#if defined(SEGTRANSFER_HAVE_AVX2)
    if (active_level() == Level::Avx2)
        return avx2::match_counts(pred, gt, n, cls, ignore);
#endif
    return scalar::match_counts(pred, gt, n, cls, ignore);
}

void argmax_rows(const float* probs, std::size_t n_pixels, int num_classes,
                 std::uint8_t* out) {
#if defined(SEGTRANSFER_HAVE_AVX2)
    if (active_level() == Level::Avx2) {
        avx2::argmax_rows(probs, n_pixels, num_classes, out);
        return;
    }
#endif
    scalar::argmax_rows(probs, n_pixels, num_classes, out);
}

void dispersion_rows(const float* probs, std::size_t n_pixels, int num_classes,
                     float* entropy, float* margin, float* varratio) {
#if defined(SEGTRANSFER_HAVE_AVX2)
    if (active_level() == Level::Avx2) {
        avx2::dispersion_rows(probs, n_pixels, num_classes, entropy, margin,
                              varratio);
        return;
    }
#endif
    scalar::dispersion_rows(probs, n_pixels, num_classes, entropy, margin,
                            varratio);
}

}  // namespace segtransfer::simd
