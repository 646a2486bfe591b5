#pragma once

#include <cstdint>
#include <vector>

#include "segtransfer/raster.hpp"

namespace segtransfer {

// Desk-scale stand-in for the generative/simulation stack: paired samples
// with a shared ground truth and two prediction channels whose error
// distributions differ by a controllable shift parameter delta.

struct SceneConfig {
    int width = 96;
    int height = 96;
    int num_classes = 8;
    int shapes_min = 4;
    int shapes_max = 12;
    bool rectangles = true;
    bool ellipses = true;
    std::uint64_t seed = 1;

    void validate() const;  // C >= 2, dimensions >= 16
};

// Per-channel corruption model. All parameters are plain numbers so a shift
// can act on the model, not on pixels. An empty confusion_bias means the
// identity matrix.
struct NoiseModel {
    double temperature = 0.25;     // probability sharpness (> 0)
    double boundary_jitter = 1.0;  // erosion/dilation band width in pixels
    std::vector<double> confusion_bias;  // C x C row-stochastic, row-major
    double blob_rate = 1.5;        // expected error blobs per image
    double blob_min = 2.0;         // blob radius range in pixels
    double blob_max = 6.0;
    std::uint64_t seed = 1;

    void validate(int num_classes) const;
};

struct ShiftConfig {
    NoiseModel base;     // real channel
    NoiseModel shifted;  // synthetic channel target at delta = 1
    double delta = 0.0;  // 0 = no shift; > 1 extrapolates past `shifted`
    // Copy the real channel's realization instead of drawing the synthetic
    // channel; exists solely for pipeline identity tests.
    bool shared_realization = false;
};

// Row-stochastic matrix with 1-epsilon on the diagonal. When focus_class is
// a valid class, it receives `focus_share` of the off-diagonal mass on top
// of the uniform spread.
std::vector<double> make_confusion_bias(int num_classes, double epsilon,
                                        int focus_class = -1,
                                        double focus_share = 0.0);

// Scalar parameterization of a NoiseModel, used by the config layer (a full
// C x C matrix does not fit a flat key-value file; the library API accepts
// arbitrary matrices directly).
struct NoiseParams {
    double temperature = 0.25;
    double boundary_jitter = 1.0;
    double blob_rate = 1.5;
    double blob_min = 2.0;
    double blob_max = 6.0;
    double confusion_epsilon = 0.02;
    int confusion_focus_class = -1;
    double confusion_focus_share = 0.0;

    NoiseModel materialize(int num_classes, std::uint64_t seed = 1) const;
    static NoiseParams default_real();
    static NoiseParams default_shifted();
};

NoiseModel default_real_noise(int num_classes);
NoiseModel default_shifted_noise(int num_classes);

// Linear interpolation of every numeric parameter by delta; delta = 0
// returns base exactly, delta > 1 extrapolates (confusion rows are clamped
// to the simplex afterwards). The seed is taken from base.
NoiseModel interpolate(const NoiseModel& base, const NoiseModel& shifted,
                       double delta);

// Deterministic per (cfg.seed, index): class-0 background with random
// shapes painted in z-order.
LabelMask gen_scene(const SceneConfig& cfg, std::uint64_t index);

// Applies, in order: boundary jitter, blob errors, per-pixel confusion
// flips; emits a probability raster whose argmax equals the corrupted mask
// by construction. The ground truth must not contain ignore pixels.
std::pair<LabelMask, ProbMap> corrupt(const LabelMask& gt,
                                      const NoiseModel& noise,
                                      std::uint64_t index);

std::vector<PairedSample> gen_paired_dataset(const SceneConfig& scene_cfg,
                                             const ShiftConfig& shift_cfg,
                                             std::size_t n);

}  // namespace segtransfer
