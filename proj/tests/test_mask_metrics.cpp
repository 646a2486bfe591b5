#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "segtransfer/mask_metrics.hpp"

using namespace segtransfer;

namespace {

LabelMask mask2x2(int num_classes, std::vector<std::uint8_t> data) {
    return LabelMask(2, 2, num_classes, std::move(data));
}

}  // namespace

TEST_CASE("confusion on hand-built masks") {
    // gt = [[1,1],[0,0]], pred = [[1,0],[0,0]]
    const auto gt = mask2x2(2, {1, 1, 0, 0});
    const auto pred = mask2x2(2, {1, 0, 0, 0});
    const auto cm = confusion(pred, gt);
    CHECK(cm.at(0, 0) == 2);
    CHECK(cm.at(0, 1) == 0);
    CHECK(cm.at(1, 0) == 1);
    CHECK(cm.at(1, 1) == 1);

    SUBCASE("identity prediction gives a diagonal matrix") {
        const auto diag = confusion(gt, gt);
        CHECK(diag.at(0, 0) == 2);
        CHECK(diag.at(1, 1) == 2);
        CHECK(diag.at(0, 1) == 0);
        CHECK(diag.at(1, 0) == 0);
    }
    SUBCASE("all-ignore ground truth contributes nothing") {
        const auto ign = mask2x2(2, {kIgnoreLabel, kIgnoreLabel, kIgnoreLabel,
                                     kIgnoreLabel});
        const auto cm2 = confusion(pred, ign);
        for (int c = 0; c < 2; ++c)
            for (int k = 0; k < 2; ++k) CHECK(cm2.at(c, k) == 0);
    }
    SUBCASE("dimension mismatch is a congruence error") {
        const LabelMask other(3, 3, 2);
        CHECK_THROWS_AS(confusion(other, gt), Error);
    }
}

TEST_CASE("iou_class on hand-built masks") {
    const auto gt = mask2x2(2, {1, 1, 0, 0});
    const auto pred = mask2x2(2, {1, 0, 0, 0});
    CHECK(*iou_class(pred, gt, 1) == doctest::Approx(0.5));
    CHECK(*iou_class(gt, gt, 1) == 1.0);

    SUBCASE("class absent from both masks is undefined, not zero") {
        const auto a = mask2x2(3, {0, 0, 1, 1});
        CHECK_FALSE(iou_class(a, a, 2).has_value());
    }
    SUBCASE("invalid class index") {
        CHECK_THROWS_AS(iou_class(pred, gt, 2), Error);
        CHECK_THROWS_AS(iou_class(pred, gt, -1), Error);
    }
}

TEST_CASE("miou_image") {
    // class 0 scores 1.0 (pred-ignore pixel keeps it clean), class 1 scores
    // 0.5 -> mean 0.75
    const LabelMask gt(4, 1, 2, std::vector<std::uint8_t>{0, 0, 1, 1});
    const LabelMask pred(4, 1, 2,
                         std::vector<std::uint8_t>{0, 0, 1, kIgnoreLabel});
    CHECK(miou_image(pred, gt) == doctest::Approx(0.75));
    CHECK(miou_image(gt, gt) == 1.0);

    SUBCASE("disjoint prediction scores zero") {
        const LabelMask p2(4, 1, 2, std::vector<std::uint8_t>{1, 1, 0, 0});
        CHECK(miou_image(p2, gt) == 0.0);
    }
    SUBCASE("no defined class is an undefined-score error") {
        const LabelMask ign(4, 1, 2,
                            std::vector<std::uint8_t>(4, kIgnoreLabel));
        CHECK_THROWS_AS(miou_image(pred, ign), Error);
        CHECK_FALSE(miou_image_opt(pred, ign).has_value());
    }
}

TEST_CASE("argmax_mask examples and tie-break") {
    ProbMap prob(3, 1, 3);
    float* r0 = prob.mutable_row(0);
    r0[0] = 0.0f; r0[1] = 1.0f; r0[2] = 0.0f;
    float* r1 = prob.mutable_row(1);
    r1[0] = 0.5f; r1[1] = 0.5f; r1[2] = 0.0f;
    float* r2 = prob.mutable_row(2);
    r2[0] = 0.2f; r2[1] = 0.3f; r2[2] = 0.5f;
    const auto mask = argmax_mask(prob);
    CHECK(mask[0] == 1);
    CHECK(mask[1] == 0);  // tie toward the lowest class index
    CHECK(mask[2] == 2);
}

TEST_CASE("argmax is invariant under strictly monotone transforms") {
    Rng rng(3);
    ProbMap prob(16, 16, 5);
    for (std::size_t i = 0; i < prob.pixel_count(); ++i) {
        float* row = prob.mutable_row(i);
        for (int k = 0; k < 5; ++k)
            row[k] = static_cast<float>(rng.next_unit());
    }
    const auto a = argmax_mask(prob);
    ProbMap squared = prob;
    for (std::size_t i = 0; i < prob.pixel_count(); ++i) {
        float* row = squared.mutable_row(i);
        for (int k = 0; k < 5; ++k) row[k] = row[k] * row[k];
    }
    const auto b = argmax_mask(squared);
    const auto c = argmax_mask(prob);  // determinism
    for (std::size_t i = 0; i < a.pixel_count(); ++i) {
        CHECK(a[i] == b[i]);
        CHECK(a[i] == c[i]);
    }
}

TEST_CASE("confusion row sums equal per-class ground-truth pixel counts") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto gt = oracles::random_mask(rng, 16, 16, 5, 0.1);
        const auto pred = oracles::random_mask(rng, 16, 16, 5, 0.05);
        const auto cm = confusion(pred, gt);
        const auto naive = oracles::confusion_counts(pred, gt);
        std::vector<std::int64_t> gt_counts(5, 0);
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x)
                if (gt.at(x, y) != kIgnoreLabel) ++gt_counts[gt.at(x, y)];
        for (int c = 0; c < 5; ++c) {
            for (int k = 0; k < 5; ++k) CHECK(cm.at(c, k) == naive[c][k]);
            CHECK(cm.gt_count(c) == gt_counts[c]);
        }
    }
}

TEST_CASE("iou_class is symmetric and matches both routes") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = oracles::random_mask(rng, 16, 16, 4);
        const auto b = oracles::random_mask(rng, 16, 16, 4);
        const auto cm = confusion(b, a);
        for (int c = 0; c < 4; ++c) {
            const auto ab = iou_class(b, a, c);
            const auto ba = iou_class(a, b, c);
            CHECK(ab.has_value() == ba.has_value());
            if (ab) CHECK(*ab == *ba);  // exact: same integer counts
            const auto via_cm = iou_class(cm, c);
            CHECK(ab.has_value() == via_cm.has_value());
            if (ab) CHECK(*ab == *via_cm);
            const auto naive = oracles::iou_class(b, a, c);
            CHECK(ab.has_value() == naive.has_value());
            if (ab) CHECK(*ab == doctest::Approx(*naive).epsilon(1e-15));
        }
    }
}

TEST_CASE("miou_image equals 1 iff masks agree on non-ignore pixels") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        auto gt = oracles::random_mask(rng, 12, 12, 4, 0.1);
        LabelMask pred = gt;
        bool has_defined = false;
        for (int c = 0; c < 4; ++c)
            has_defined = has_defined || iou_class(pred, gt, c).has_value();
        if (!has_defined) continue;
        CHECK(miou_image(pred, gt) == 1.0);
        // flip one non-ignore pixel; the mean must drop below 1
        bool flipped = false;
        for (int y = 0; y < 12 && !flipped; ++y) {
            for (int x = 0; x < 12 && !flipped; ++x) {
                if (gt.at(x, y) == kIgnoreLabel) continue;
                pred.set(x, y,
                         static_cast<std::uint8_t>((gt.at(x, y) + 1) % 4));
                flipped = true;
            }
        }
        if (flipped) CHECK(miou_image(pred, gt) < 1.0);
    }
}
