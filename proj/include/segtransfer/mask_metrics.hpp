#pragma once

#include <optional>
#include <vector>

#include "segtransfer/raster.hpp"

namespace segtransfer {

// Pixel-level scoring primitives shared by all analyses. All ratios are
// computed in double from 64-bit integer counts; an IoU with an empty union
// is reported as absent, never as 0.

ConfusionMatrix confusion(const LabelMask& pred, const LabelMask& gt);

// Intersection over union for one class, over non-ignore pixels. Absent when
// the class occurs in neither raster. Throws Domain for a bad class index.
std::optional<double> iou_class(const LabelMask& pred, const LabelMask& gt,
                                int cls);

// Same quantity derived from a precomputed confusion matrix (second
// algebraic route; the two are equivalence-tested).
std::optional<double> iou_class(const ConfusionMatrix& cm, int cls);

std::vector<std::optional<double>> class_ious(const ConfusionMatrix& cm);

// Arithmetic mean of the defined per-class IoUs. Throws UndefinedScore when
// no class has a defined IoU.
double miou_image(const LabelMask& pred, const LabelMask& gt);
std::optional<double> miou_image_opt(const LabelMask& pred,
                                     const LabelMask& gt);
std::optional<double> miou_image_opt(const ConfusionMatrix& cm);

// Per-pixel class of maximal probability; ties break toward the lowest
// class index.
LabelMask argmax_mask(const ProbMap& prob);

}  // namespace segtransfer
