#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "segtransfer/raster.hpp"
#include "segtransfer/rng.hpp"
#include "segtransfer/simd/kernels.hpp"

using namespace segtransfer;

namespace {

std::vector<std::uint8_t> random_mask(Rng& rng, std::size_t n, int num_classes,
                                      double ignore_p) {
    std::vector<std::uint8_t> data(n);
    for (auto& v : data)
        v = rng.next_bool(ignore_p)
                ? kIgnoreLabel
                : static_cast<std::uint8_t>(rng.next_below(num_classes));
    return data;
}

std::vector<float> random_prob_rows(Rng& rng, std::size_t n_pixels, int c) {
    std::vector<float> rows(n_pixels * c);
    for (std::size_t i = 0; i < n_pixels; ++i) {
        double sum = 0.0;
        for (int k = 0; k < c; ++k) {
            const double v = rng.next_unit() + 1e-6;
            rows[i * c + k] = static_cast<float>(v);
            sum += v;
        }
        for (int k = 0; k < c; ++k)
            rows[i * c + k] = static_cast<float>(rows[i * c + k] / sum);
    }
    return rows;
}

}  // namespace

TEST_CASE("match_counts agrees with a naive double loop") {
    Rng rng(11);
    for (std::size_t n : {1u, 31u, 32u, 33u, 100u, 1000u}) {
        const auto pred = random_mask(rng, n, 5, 0.0);
        const auto gt = random_mask(rng, n, 5, 0.1);
        for (std::uint8_t cls = 0; cls < 5; ++cls) {
            std::int64_t inter = 0, uni = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool p = pred[i] == cls, g = gt[i] == cls;
                inter += p && g;
                uni += gt[i] != kIgnoreLabel && (p || g);
            }
            const auto mc = simd::scalar::match_counts(pred.data(), gt.data(),
                                                       n, cls, kIgnoreLabel);
            CHECK(mc.intersection == inter);
            CHECK(mc.union_count == uni);
        }
    }
}

TEST_CASE("scalar argmax breaks ties toward the lowest class index") {
    const std::vector<float> rows = {0.0f, 1.0f, 0.0f,   // -> 1
                                     0.5f, 0.5f, 0.0f,   // tie -> 0
                                     0.2f, 0.3f, 0.5f};  // -> 2
    std::vector<std::uint8_t> out(3);
    simd::scalar::argmax_rows(rows.data(), 3, 3, out.data());
    CHECK(out[0] == 1);
    CHECK(out[1] == 0);
    CHECK(out[2] == 2);
}

TEST_CASE("scalar dispersion matches the closed forms") {
    const int c = 4;
    std::vector<float> rows = {1.0f, 0.0f, 0.0f, 0.0f,      // one-hot
                               0.25f, 0.25f, 0.25f, 0.25f};  // uniform
    std::vector<float> ent(2), mar(2), var(2);
    simd::scalar::dispersion_rows(rows.data(), 2, c, ent.data(), mar.data(),
                                  var.data());
    CHECK(ent[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(mar[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(var[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(ent[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mar[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(var[1] == doctest::Approx(1.0 - 1.0 / c).epsilon(1e-6));

    std::vector<float> two = {0.75f, 0.25f};
    std::vector<float> e(1), m(1), v(1);
    simd::scalar::dispersion_rows(two.data(), 1, 2, e.data(), m.data(),
                                  v.data());
    CHECK(e[0] == doctest::Approx(0.811278).epsilon(1e-5));
    CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(v[0] == doctest::Approx(0.25).epsilon(1e-6));
}

#if defined(SEGTRANSFER_HAVE_AVX2)

TEST_CASE("avx2 kernels are equivalent to the scalar references") {
    if (simd::detect_best() != simd::Level::Avx2) {
        MESSAGE("avx2 not available on this CPU; skipping");
        return;
    }
    Rng rng(7);

    SUBCASE("match_counts is bit-exact") {
        for (std::size_t n : {1u, 17u, 32u, 63u, 64u, 65u, 4096u, 10007u}) {
            const auto pred = random_mask(rng, n, 7, 0.02);
            const auto gt = random_mask(rng, n, 7, 0.1);
            for (std::uint8_t cls = 0; cls < 7; ++cls) {
                const auto a = simd::scalar::match_counts(
                    pred.data(), gt.data(), n, cls, kIgnoreLabel);
                const auto b = simd::avx2::match_counts(
                    pred.data(), gt.data(), n, cls, kIgnoreLabel);
                CHECK(a.intersection == b.intersection);
                CHECK(a.union_count == b.union_count);
            }
        }
    }

    SUBCASE("argmax is bit-exact including ties and tails") {
        for (int c : {2, 5, 8, 9, 13, 16, 19, 35}) {
            auto rows = random_prob_rows(rng, 257, c);
            // inject exact ties
            for (std::size_t i = 0; i < 257; i += 5) {
                const int a = static_cast<int>(rng.next_below(c));
                const int b = static_cast<int>(rng.next_below(c));
                rows[i * c + a] = rows[i * c + b];
            }
            std::vector<std::uint8_t> s(257), v(257);
            simd::scalar::argmax_rows(rows.data(), 257, c, s.data());
            simd::avx2::argmax_rows(rows.data(), 257, c, v.data());
            for (std::size_t i = 0; i < 257; ++i) {
                INFO("c = " << c << ", pixel " << i);
                CHECK(s[i] == v[i]);
            }
        }
    }

    SUBCASE("dispersions: margin/varratio bit-exact, entropy toleranced") {
        for (int c : {2, 5, 8, 9, 16, 19, 35}) {
            auto rows = random_prob_rows(rng, 300, c);
            // sprinkle exact zeros to exercise the 0 ln 0 path
            for (std::size_t i = 0; i < rows.size(); i += 7) rows[i] = 0.0f;
            std::vector<float> es(300), ms(300), vs(300);
            std::vector<float> ev(300), mv(300), vv(300);
            simd::scalar::dispersion_rows(rows.data(), 300, c, es.data(),
                                          ms.data(), vs.data());
            simd::avx2::dispersion_rows(rows.data(), 300, c, ev.data(),
                                        mv.data(), vv.data());
            for (std::size_t i = 0; i < 300; ++i) {
                INFO("c = " << c << ", pixel " << i);
                CHECK(ms[i] == mv[i]);
                CHECK(vs[i] == vv[i]);
                CHECK(std::abs(es[i] - ev[i]) <= 2e-5f);
            }
        }
    }
}

#endif  // SEGTRANSFER_HAVE_AVX2

TEST_CASE("dispatch override switches levels") {
    const auto best = simd::detect_best();
    simd::force_level(simd::Level::Scalar);
    CHECK(simd::active_level() == simd::Level::Scalar);
    simd::force_level(best);
    CHECK(simd::active_level() == best);
}
