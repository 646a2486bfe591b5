#include "segtransfer/mask_metrics.hpp"

#include "segtransfer/simd/kernels.hpp"

namespace segtransfer {

namespace {

void check_class(const LabelMask& mask, int cls) {
    if (cls < 0 || cls >= mask.num_classes())
        raise(ErrorCode::Domain,
              "class index " + std::to_string(cls) + " out of range [0, " +
                  std::to_string(mask.num_classes()) + ")");
}

}  // namespace

ConfusionMatrix confusion(const LabelMask& pred, const LabelMask& gt) {
    pred.require_congruent(gt);
    ConfusionMatrix cm(gt.num_classes());
    simd::pair_histogram(pred.data().data(), gt.data().data(),
                         gt.pixel_count(), gt.num_classes(), kIgnoreLabel,
                         &cm.at(0, 0), &cm.invalid(0));
    return cm;
}

std::optional<double> iou_class(const LabelMask& pred, const LabelMask& gt,
                                int cls) {
    pred.require_congruent(gt);
    check_class(gt, cls);
    const auto mc = simd::match_counts(pred.data().data(), gt.data().data(),
                                       gt.pixel_count(),
                                       static_cast<std::uint8_t>(cls),
                                       kIgnoreLabel);
    if (mc.union_count == 0) return std::nullopt;
    return static_cast<double>(mc.intersection) /
           static_cast<double>(mc.union_count);
}

std::optional<double> iou_class(const ConfusionMatrix& cm, int cls) {
    if (cls < 0 || cls >= cm.num_classes())
        raise(ErrorCode::Domain, "class index out of range");
    // union = |gt = c| + |pred = c| - |both|, over non-ignore ground truth;
    // predicted-ignore pixels inside Y_c count toward |gt = c| but can never
    // intersect, matching the direct pixel tally.
    const std::int64_t inter = cm.at(cls, cls);
    const std::int64_t uni =
        cm.gt_count(cls) + cm.pred_count(cls) - inter;
    if (uni == 0) return std::nullopt;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::optional<double>> class_ious(const ConfusionMatrix& cm) {
    std::vector<std::optional<double>> out(cm.num_classes());
    for (int c = 0; c < cm.num_classes(); ++c) out[c] = iou_class(cm, c);
    return out;
}

std::optional<double> miou_image_opt(const ConfusionMatrix& cm) {
    double sum = 0.0;
    int defined = 0;
    for (int c = 0; c < cm.num_classes(); ++c) {
        if (auto iou = iou_class(cm, c)) {
            sum += *iou;
            ++defined;
        }
    }
    if (defined == 0) return std::nullopt;
    return sum / defined;
}

std::optional<double> miou_image_opt(const LabelMask& pred,
                                     const LabelMask& gt) {
    return miou_image_opt(confusion(pred, gt));
}

double miou_image(const LabelMask& pred, const LabelMask& gt) {
    auto v = miou_image_opt(pred, gt);
    if (!v)
        raise(ErrorCode::UndefinedScore,
              "no class has a defined IoU for this image");
    return *v;
}

LabelMask argmax_mask(const ProbMap& prob) {
    LabelMask out(prob.width(), prob.height(), prob.num_classes());
    simd::argmax_rows(prob.data().data(), prob.pixel_count(),
                      prob.num_classes(), out.mutable_data().data());
    return out;
}

}  // namespace segtransfer
