#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "segtransfer/errordist.hpp"
#include "segtransfer/mask_metrics.hpp"

using namespace segtransfer;

TEST_CASE("per_image_errors on hand-built masks") {
    // gt class 1 on 4 pixels; pred assigns 1 to two, 0 to one, 2 to one
    LabelMask gt(4, 1, 3, std::vector<std::uint8_t>{1, 1, 1, 1});
    LabelMask pred(4, 1, 3, std::vector<std::uint8_t>{1, 1, 0, 2});
    const auto row = per_image_errors(pred, gt, 1, "img");
    REQUIRE(row.has_value());
    CHECK(row->tp == doctest::Approx(0.5));
    CHECK(row->fn[0] == doctest::Approx(0.25));
    CHECK(row->fn[2] == doctest::Approx(0.25));
    CHECK(row->fn[1] == 0.0);
    CHECK(row->invalid == 0.0);
    CHECK(row->sample_id == "img");

    SUBCASE("perfect prediction") {
        const auto perfect = per_image_errors(gt, gt, 1);
        CHECK(perfect->tp == 1.0);
        for (double v : perfect->fn) CHECK(v == 0.0);
    }
    SUBCASE("empty ground-truth class is absent") {
        CHECK_FALSE(per_image_errors(pred, gt, 0).has_value());
    }
    SUBCASE("prediction with ignore label fills the invalid axis") {
        LabelMask p2(4, 1, 3,
                     std::vector<std::uint8_t>{1, kIgnoreLabel, 0, 1});
        const auto r2 = per_image_errors(p2, gt, 1);
        CHECK(r2->tp == doctest::Approx(0.5));
        CHECK(r2->invalid == doctest::Approx(0.25));
        CHECK(r2->fn[0] == doctest::Approx(0.25));
    }
    SUBCASE("invalid class index") {
        CHECK_THROWS_AS(per_image_errors(pred, gt, 7), Error);
    }
}

TEST_CASE("tp + sum(fn) + invalid is an exact ratio identity") {
    Rng rng(51);
    for (int trial = 0; trial < 200; ++trial) {
        const auto gt = oracles::random_mask(rng, 16, 16, 5, 0.05);
        const auto pred = oracles::random_mask(rng, 16, 16, 5, 0.03);
        const auto cm = confusion(pred, gt);
        for (int c = 0; c < 5; ++c) {
            const auto row = per_image_errors(cm, c, "t");
            if (!row) continue;
            const double sum = row->tp + row->invalid +
                               std::accumulate(row->fn.begin(), row->fn.end(),
                                               0.0);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            // cross-check against the naive oracle
            const auto naive = oracles::per_image_errors(pred, gt, c);
            CHECK(row->tp == naive->tp);
            CHECK(row->invalid == naive->invalid);
            for (int k = 0; k < 5; ++k) {
                const double expect =
                    naive->fn.count(k) ? naive->fn.at(k) : 0.0;
                CHECK(row->fn[k] == expect);
            }
        }
    }
}

TEST_CASE("aggregate_profile") {
    PerImageErrorRow a{"a", 1, 0.5, {0.25, 0.0, 0.25}, 0.0};
    PerImageErrorRow b{"b", 1, 1.0, {0.0, 0.0, 0.0}, 0.0};
    const auto profile = aggregate_profile(std::vector{a, b}, 1);
    CHECK(profile.tps == doctest::Approx(0.75));
    CHECK(profile.fns[0] == doctest::Approx(0.125));
    CHECK(profile.fns[2] == doctest::Approx(0.125));
    CHECK(profile.contributing_images == 2);

    SUBCASE("single row equals the row") {
        const auto one = aggregate_profile(std::vector{a}, 1);
        CHECK(one.tps == a.tp);
        CHECK(one.fns == a.fn);
        CHECK(one.contributing_images == 1);
    }
    SUBCASE("identical rows equal the row") {
        const auto same = aggregate_profile(std::vector{a, a, a}, 1);
        CHECK(same.tps == a.tp);
        CHECK(same.fns == a.fn);
    }
    SUBCASE("empty rows are an insufficient-data error") {
        CHECK_THROWS_AS(aggregate_profile(std::vector<PerImageErrorRow>{}, 1),
                        Error);
    }
    SUBCASE("mismatched class is a congruence error") {
        PerImageErrorRow wrong{"w", 0, 1.0, {0.0, 0.0, 0.0}, 0.0};
        CHECK_THROWS_AS(aggregate_profile(std::vector{a, wrong}, 1), Error);
    }
}

TEST_CASE("radar_data is a lossless reformatting") {
    ClassErrorProfile p;
    p.cls = 1;
    p.tps = 0.5;
    p.fns = {0.25, 0.0, 0.25};
    p.invalid = 0.0;
    p.contributing_images = 3;
    ClassErrorProfile q = p;
    q.tps = 0.9;
    q.fns = {0.05, 0.0, 0.05};

    const auto series = radar_data({{"real", p}, {"synthetic", q}});
    REQUIRE(series.polylines.size() == 2);
    CHECK(series.axis_labels.size() == 4);  // 3 classes + invalid
    CHECK(series.axis_labels.back() == "invalid");
    // axis c carries TPS, axis k != c carries FNS_{c,k}
    CHECK(series.polylines[0].second[1] == p.tps);
    CHECK(series.polylines[0].second[0] == p.fns[0]);
    CHECK(series.polylines[0].second[2] == p.fns[2]);
    CHECK(series.polylines[0].second[3] == p.invalid);
    CHECK(series.polylines[1].second[1] == q.tps);

    SUBCASE("perfect profile puts 1 on the own axis and 0 elsewhere") {
        ClassErrorProfile perfect;
        perfect.cls = 0;
        perfect.tps = 1.0;
        perfect.fns = {0.0, 0.0, 0.0};
        const auto s = radar_data({{"real", perfect}});
        CHECK(s.polylines[0].second == std::vector<double>{1.0, 0.0, 0.0, 0.0});
    }
    SUBCASE("identical profiles give coincident polylines") {
        const auto s = radar_data({{"real", p}, {"synthetic", p}});
        CHECK(s.polylines[0].second == s.polylines[1].second);
    }
    SUBCASE("class mismatch across datasets is a congruence error") {
        ClassErrorProfile other = p;
        other.cls = 2;
        CHECK_THROWS_AS(radar_data({{"real", p}, {"synthetic", other}}),
                        Error);
    }
}

TEST_CASE("boxplot_stats") {
    SUBCASE("constant values collapse to a point with no outliers") {
        const std::vector<double> v(7, 3.25);
        const auto s = boxplot_stats(v);
        CHECK(s.min == 3.25);
        CHECK(s.q1 == 3.25);
        CHECK(s.median == 3.25);
        CHECK(s.q3 == 3.25);
        CHECK(s.max == 3.25);
        CHECK(s.outliers.empty());
    }
    SUBCASE("1..9 quartiles by linear interpolation") {
        std::vector<double> v{9, 1, 8, 2, 7, 3, 6, 4, 5};
        const auto s = boxplot_stats(v);
        CHECK(s.q1 == 3.0);
        CHECK(s.median == 5.0);
        CHECK(s.q3 == 7.0);
        CHECK(s.min == 1.0);
        CHECK(s.max == 9.0);
        CHECK(s.outliers.empty());
    }
    SUBCASE("Tukey rule flags far points") {
        const std::vector<double> v{0, 0, 0, 0, 10};
        const auto s = boxplot_stats(v);
        REQUIRE(s.outliers.size() == 1);
        CHECK(s.outliers[0] == 10.0);
        CHECK(s.max == 0.0);  // whisker stops at the fence
    }
    SUBCASE("ordering invariant on random data") {
        Rng rng(61);
        for (int t = 0; t < 50; ++t) {
            std::vector<double> v(30);
            for (auto& x : v) x = rng.next_unit();
            const auto s = boxplot_stats(v);
            CHECK(s.min <= s.q1);
            CHECK(s.q1 <= s.median);
            CHECK(s.median <= s.q3);
            CHECK(s.q3 <= s.max);
        }
    }
    SUBCASE("empty input") {
        CHECK_THROWS_AS(boxplot_stats(std::vector<double>{}), Error);
    }
}

TEST_CASE("FNS is antitone to IoU on a single image without false positives") {
    // fixed |Y_c| = 16 on a 16x1 strip; growing correct coverage must raise
    // IoU and shrink the summed FN mass
    double prev_iou = -1.0, prev_fn = 2.0;
    for (int correct = 1; correct <= 16; ++correct) {
        LabelMask gt(16, 1, 3, std::vector<std::uint8_t>(16, 1));
        std::vector<std::uint8_t> pd(16, 2);
        for (int i = 0; i < correct; ++i) pd[i] = 1;
        LabelMask pred(16, 1, 3, std::move(pd));
        const double iou = *iou_class(pred, gt, 1);
        const auto row = per_image_errors(pred, gt, 1);
        const double fn_sum =
            std::accumulate(row->fn.begin(), row->fn.end(), 0.0);
        CHECK(iou > prev_iou);
        CHECK(fn_sum < prev_fn);
        prev_iou = iou;
        prev_fn = fn_sum;
    }
}
