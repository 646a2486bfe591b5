#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "segtransfer/paircorr.hpp"

using namespace segtransfer;

TEST_CASE("pearson closed-form values") {
    const std::vector<double> x{1, 2, 3};
    CHECK(pearson(x, x) == 1.0);  // exact
    CHECK(pearson(x, std::vector<double>{3, 2, 1}) == -1.0);
    CHECK(pearson(x, std::vector<double>{1, 3, 2}) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pearson error cases") {
    const std::vector<double> x{1, 2, 3};
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), Error);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, x), Error);
    CHECK_THROWS_AS(pearson(x, std::vector<double>{4, 4, 4}), Error);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{2}),
                    Error);
    try {
        pearson(std::vector<double>{1, 1}, std::vector<double>{1, 2});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UndefinedCorrelation);
    }
}

TEST_CASE("pearson matches a textbook implementation on random vectors") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> xs(50), ys(50);
        for (int i = 0; i < 50; ++i) {
            xs[i] = rng.next_unit() * 10.0 - 5.0;
            ys[i] = 0.4 * xs[i] + rng.next_unit() * 4.0;
        }
        CHECK(std::abs(pearson(xs, ys) - oracles::pearson(xs, ys)) <= 1e-10);
    }
}

TEST_CASE("pearson affine invariance") {
    Rng rng(9);
    std::vector<double> xs(40), ys(40);
    for (int i = 0; i < 40; ++i) {
        xs[i] = rng.next_unit();
        ys[i] = rng.next_unit();
    }
    const double r = pearson(xs, ys);
    std::vector<double> pos(40), neg(40);
    for (int i = 0; i < 40; ++i) {
        pos[i] = 2.5 * xs[i] + 7.0;
        neg[i] = -1.5 * xs[i] + 3.0;
    }
    CHECK(pearson(pos, ys) == doctest::Approx(r).epsilon(1e-12));
    CHECK(pearson(neg, ys) == doctest::Approx(-r).epsilon(1e-12));
    CHECK(pearson(xs, xs) == 1.0);
}

TEST_CASE("spearman ranks with ties") {
    // monotone transform leaves spearman at exactly 1
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> y{1, 4, 9, 16, 25};
    CHECK(spearman(x, y) == 1.0);
    const std::vector<double> rev{5, 4, 3, 2, 1};
    CHECK(spearman(x, rev) == -1.0);
    // tied values get their average rank
    const std::vector<double> a{1, 2, 2, 3};
    const std::vector<double> b{1, 2, 2, 3};
    CHECK(spearman(a, b) == 1.0);
}

namespace {

PairedSample sample_from(std::string id, LabelMask gt, LabelMask real,
                         LabelMask syn) {
    PairedSample s;
    s.sample_id = std::move(id);
    s.gt = std::move(gt);
    s.pred_real = std::move(real);
    s.pred_syn = std::move(syn);
    return s;
}

}  // namespace

TEST_CASE("build_series on identity predictions is constant 1") {
    Rng rng(21);
    std::vector<PairedSample> samples;
    for (int i = 0; i < 4; ++i) {
        auto gt = oracles::random_mask(rng, 8, 8, 3);
        samples.push_back(sample_from("s" + std::to_string(i), gt, gt, gt));
    }
    const auto series = build_series(samples, ClassScope::miou());
    for (std::size_t i = 0; i < series.values_real.size(); ++i) {
        CHECK(*series.values_real[i] == 1.0);
        CHECK(*series.values_syn[i] == 1.0);
    }
}

TEST_CASE("build_series marks class-absent images as absent pairs") {
    LabelMask gt(4, 4, 3, 0);  // only class 0 present
    const auto samples = std::vector<PairedSample>{
        sample_from("only", gt, gt, gt)};
    const auto series =
        build_series(samples, ClassScope::for_class(2));
    REQUIRE(series.values_real.size() == 1);
    CHECK_FALSE(series.values_real[0].has_value());
    CHECK_FALSE(series.values_syn[0].has_value());
    CHECK(series.defined_pairs().first.empty());
}

TEST_CASE("build_series matches the brute-force oracle per image") {
    Rng rng(33);
    std::vector<PairedSample> samples;
    for (int i = 0; i < 3; ++i) {
        auto gt = oracles::random_mask(rng, 10, 10, 4, 0.05);
        auto real = oracles::random_mask(rng, 10, 10, 4);
        auto syn = oracles::random_mask(rng, 10, 10, 4);
        samples.push_back(sample_from("s" + std::to_string(i), gt, real, syn));
    }
    for (int c = 0; c < 4; ++c) {
        const auto series = build_series(samples, ClassScope::for_class(c));
        for (int i = 0; i < 3; ++i) {
            const auto expect_r =
                oracles::iou_class(samples[i].pred_real, samples[i].gt, c);
            const auto expect_s =
                oracles::iou_class(samples[i].pred_syn, samples[i].gt, c);
            CHECK(series.values_real[i].has_value() == expect_r.has_value());
            if (expect_r)
                CHECK(*series.values_real[i] == doctest::Approx(*expect_r));
            if (expect_s)
                CHECK(*series.values_syn[i] == doctest::Approx(*expect_s));
        }
    }
    const auto miou = build_series(samples, ClassScope::miou());
    for (int i = 0; i < 3; ++i) {
        const auto expect =
            oracles::miou_image(samples[i].pred_real, samples[i].gt);
        CHECK(*miou.values_real[i] == doctest::Approx(*expect).epsilon(1e-12));
    }
}

TEST_CASE("classwise_correlations: identical channels give r = 1") {
    Rng rng(41);
    std::vector<PairedSample> samples;
    for (int i = 0; i < 12; ++i) {
        auto gt = oracles::random_mask(rng, 12, 12, 3);
        auto pred = oracles::random_mask(rng, 12, 12, 3);
        samples.push_back(
            sample_from("s" + std::to_string(i), gt, pred, pred));
    }
    CorrOptions opts;
    opts.min_pairs = 5;
    const auto report = classwise_correlations(samples, opts);
    CHECK(report.miou_status == CorrStatus::Ok);
    CHECK(*report.miou_r == 1.0);  // exact on identical series
    for (const auto& cc : report.classes) {
        if (cc.status == CorrStatus::Ok) CHECK(*cc.r == 1.0);
        CHECK(cc.mean_iou_real == cc.mean_iou_syn);
        CHECK(cc.pooled_iou_real == cc.pooled_iou_syn);
    }
}

TEST_CASE("classes under the pair minimum are marked insufficient") {
    Rng rng(43);
    std::vector<PairedSample> samples;
    for (int i = 0; i < 6; ++i) {
        // class 2 appears in only one image
        LabelMask gt(6, 6, 3, 0);
        if (i == 0) gt.set(0, 0, 2);
        gt.set(1, 1, 1);
        auto pred = gt;
        pred.set(2, 2, 1);
        samples.push_back(sample_from("s" + std::to_string(i), gt, pred, pred));
    }
    CorrOptions opts;
    opts.min_pairs = 3;
    const auto report = classwise_correlations(samples, opts);
    CHECK(report.classes[2].status == CorrStatus::InsufficientPairs);
    CHECK_FALSE(report.classes[2].r.has_value());
    CHECK(report.classes[2].pair_count == 1);
}

TEST_CASE("constant class series reports constant_series, not a number") {
    std::vector<PairedSample> samples;
    for (int i = 0; i < 6; ++i) {
        LabelMask gt(4, 4, 2, 0);
        gt.set(0, 0, 1);
        samples.push_back(sample_from("s" + std::to_string(i), gt, gt, gt));
    }
    CorrOptions opts;
    opts.min_pairs = 2;
    const auto report = classwise_correlations(samples, opts);
    CHECK(report.classes[0].status == CorrStatus::ConstantSeries);
    CHECK_FALSE(report.classes[0].r.has_value());
}

TEST_CASE("fp_only_as_zero keeps one-sided pairs") {
    // gt lacks class 1; real predicts it (IoU 0), synthetic does not
    LabelMask gt(4, 4, 2, 0);
    LabelMask real = gt;
    real.set(0, 0, 1);
    LabelMask syn = gt;
    std::vector<PairedSample> samples{sample_from("s0", gt, real, syn)};

    CorrOptions keep;
    keep.fp_only_as_zero = true;
    const auto kept = build_series(samples, ClassScope::for_class(1), keep);
    CHECK(kept.values_real[0].has_value());
    CHECK(*kept.values_real[0] == 0.0);
    CHECK(kept.values_syn[0].has_value());
    CHECK(*kept.values_syn[0] == 0.0);

    const auto dropped = build_series(samples, ClassScope::for_class(1));
    CHECK(dropped.values_real[0].has_value());
    CHECK_FALSE(dropped.values_syn[0].has_value());
}

TEST_CASE("empty input is an empty-dataset error") {
    std::vector<PairedSample> none;
    CHECK_THROWS_AS(build_series(none, ClassScope::miou()), Error);
    CHECK_THROWS_AS(classwise_correlations(none), Error);
}
