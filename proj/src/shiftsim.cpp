#include "segtransfer/shiftsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "segtransfer/rng.hpp"

namespace segtransfer {

namespace {

constexpr double kMinTemperature = 1e-3;
// noise amplitude added to the winning-class logit gap of 1; < 1 so the
// corrupted label always keeps the strictly largest probability
constexpr double kLogitNoise = 0.8;

}  // namespace

void SceneConfig::validate() const {
    if (num_classes < 2)
        raise(ErrorCode::InvalidConfig, "scene needs at least two classes");
    if (num_classes > 254)
        raise(ErrorCode::InvalidConfig, "scene num_classes exceeds 254");
    if (width < 16 || height < 16)
        raise(ErrorCode::InvalidConfig, "scene dimensions must be >= 16");
    if (shapes_min < 0 || shapes_max < shapes_min)
        raise(ErrorCode::InvalidConfig, "invalid shape count range");
    if (!rectangles && !ellipses)
        raise(ErrorCode::InvalidConfig, "at least one shape kind required");
}

void NoiseModel::validate(int num_classes) const {
    if (temperature <= 0.0)
        raise(ErrorCode::InvalidConfig, "temperature must be positive");
    if (boundary_jitter < 0.0 || blob_rate < 0.0 || blob_min < 0.0)
        raise(ErrorCode::InvalidConfig, "noise rates must be >= 0");
    if (blob_max < blob_min)
        raise(ErrorCode::InvalidConfig, "blob_max below blob_min");
    if (confusion_bias.empty()) return;  // identity
    const std::size_t c = static_cast<std::size_t>(num_classes);
    if (confusion_bias.size() != c * c)
        raise(ErrorCode::InvalidConfig, "confusion_bias is not C x C");
    for (std::size_t row = 0; row < c; ++row) {
        double sum = 0.0;
        for (std::size_t k = 0; k < c; ++k) {
            const double v = confusion_bias[row * c + k];
            if (v < 0.0)
                raise(ErrorCode::InvalidConfig,
                      "confusion_bias entries must be >= 0");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            raise(ErrorCode::InvalidConfig,
                  "confusion_bias row " + std::to_string(row) +
                      " sums to " + std::to_string(sum));
    }
}

std::vector<double> make_confusion_bias(int num_classes, double epsilon,
                                        int focus_class, double focus_share) {
    if (num_classes < 2)
        raise(ErrorCode::InvalidConfig, "need at least two classes");
    if (epsilon < 0.0 || epsilon > 1.0 || focus_share < 0.0 ||
        focus_share > 1.0)
        raise(ErrorCode::InvalidConfig, "epsilon/focus_share outside [0, 1]");
    const std::size_t c = static_cast<std::size_t>(num_classes);
    std::vector<double> bias(c * c, 0.0);
    for (std::size_t row = 0; row < c; ++row) {
        const double uniform =
            epsilon * (1.0 - focus_share) / static_cast<double>(c - 1);
        double diag = 1.0 - epsilon;
        for (std::size_t k = 0; k < c; ++k)
            if (k != row) bias[row * c + k] = uniform;
        if (focus_class >= 0 && focus_class < num_classes &&
            focus_class != static_cast<int>(row)) {
            bias[row * c + focus_class] += epsilon * focus_share;
        } else {
            // no focus target in this row: give the focused mass back to
            // the diagonal so the row still sums to one
            diag += epsilon * focus_share;
        }
        bias[row * c + row] = diag;
    }
    return bias;
}

NoiseModel NoiseParams::materialize(int num_classes, std::uint64_t seed) const {
    NoiseModel m;
    m.temperature = temperature;
    m.boundary_jitter = boundary_jitter;
    m.blob_rate = blob_rate;
    m.blob_min = blob_min;
    m.blob_max = blob_max;
    m.confusion_bias = make_confusion_bias(
        num_classes, confusion_epsilon, confusion_focus_class,
        confusion_focus_share);
    m.seed = seed;
    m.validate(num_classes);
    return m;
}

NoiseParams NoiseParams::default_real() { return NoiseParams{}; }

NoiseParams NoiseParams::default_shifted() {
    NoiseParams p;
    p.temperature = 0.70;
    p.boundary_jitter = 3.0;
    p.blob_rate = 4.0;
    p.blob_min = 3.0;
    p.blob_max = 9.0;
    p.confusion_epsilon = 0.10;
    p.confusion_focus_class = 2;
    p.confusion_focus_share = 0.7;
    return p;
}

NoiseModel default_real_noise(int num_classes) {
    return NoiseParams::default_real().materialize(num_classes);
}

NoiseModel default_shifted_noise(int num_classes) {
    NoiseParams p = NoiseParams::default_shifted();
    if (num_classes <= 2) p.confusion_focus_class = 0;
    return p.materialize(num_classes);
}

NoiseModel interpolate(const NoiseModel& base, const NoiseModel& shifted,
                       double delta) {
    if (delta == 0.0) return base;
    auto lerp = [delta](double a, double b) { return a + delta * (b - a); };
    NoiseModel out;
    out.seed = base.seed;
    out.temperature = std::max(kMinTemperature,
                               lerp(base.temperature, shifted.temperature));
    out.boundary_jitter =
        std::max(0.0, lerp(base.boundary_jitter, shifted.boundary_jitter));
    out.blob_rate = std::max(0.0, lerp(base.blob_rate, shifted.blob_rate));
    out.blob_min = std::max(0.0, lerp(base.blob_min, shifted.blob_min));
    out.blob_max = std::max(out.blob_min, lerp(base.blob_max, shifted.blob_max));

    if (base.confusion_bias.empty() && shifted.confusion_bias.empty())
        return out;
    const std::size_t n =
        std::max(base.confusion_bias.size(), shifted.confusion_bias.size());
    const std::size_t c = static_cast<std::size_t>(
        std::llround(std::sqrt(static_cast<double>(n))));
    auto entry = [c](const std::vector<double>& bias, std::size_t row,
                     std::size_t k) {
        if (bias.empty()) return row == k ? 1.0 : 0.0;
        return bias[row * c + k];
    };
    out.confusion_bias.assign(c * c, 0.0);
    for (std::size_t row = 0; row < c; ++row) {
        double sum = 0.0;
        for (std::size_t k = 0; k < c; ++k) {
            // delta in [0, 1] is a convex combination and stays on the
            // simplex; extrapolation is clamped and renormalized
            const double v =
                std::max(0.0, lerp(entry(base.confusion_bias, row, k),
                                   entry(shifted.confusion_bias, row, k)));
            out.confusion_bias[row * c + k] = v;
            sum += v;
        }
        if (sum <= 0.0) {
            out.confusion_bias[row * c + row] = 1.0;
        } else if (std::abs(sum - 1.0) > 1e-12) {
            for (std::size_t k = 0; k < c; ++k)
                out.confusion_bias[row * c + k] /= sum;
        }
    }
    return out;
}

LabelMask gen_scene(const SceneConfig& cfg, std::uint64_t index) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, index, "scene"));
    LabelMask mask(cfg.width, cfg.height, cfg.num_classes, 0);

    const std::int64_t shapes = rng.next_in(cfg.shapes_min, cfg.shapes_max);
    for (std::int64_t s = 0; s < shapes; ++s) {
        bool ellipse;
        if (cfg.rectangles && cfg.ellipses)
            ellipse = rng.next_bool(0.5);
        else
            ellipse = cfg.ellipses;
        const std::uint8_t cls = static_cast<std::uint8_t>(
            1 + rng.next_below(static_cast<std::uint64_t>(cfg.num_classes - 1)));
        const int cx = static_cast<int>(rng.next_below(cfg.width));
        const int cy = static_cast<int>(rng.next_below(cfg.height));
        const int half_w =
            static_cast<int>(rng.next_in(2, std::max(3, cfg.width / 4)));
        const int half_h =
            static_cast<int>(rng.next_in(2, std::max(3, cfg.height / 4)));

        const int x0 = std::max(0, cx - half_w);
        const int x1 = std::min(cfg.width - 1, cx + half_w);
        const int y0 = std::max(0, cy - half_h);
        const int y1 = std::min(cfg.height - 1, cy + half_h);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (ellipse) {
                    const double dx = static_cast<double>(x - cx) / half_w;
                    const double dy = static_cast<double>(y - cy) / half_h;
                    if (dx * dx + dy * dy > 1.0) continue;
                }
                mask.set(x, y, cls);
            }
        }
    }
    return mask;
}

namespace {

void apply_boundary_jitter(LabelMask& mask, double jitter, Rng& rng) {
    if (jitter <= 0.0) return;
    const int w = mask.width();
    const int h = mask.height();
    const int passes = static_cast<int>(std::ceil(jitter));
    std::vector<std::uint8_t> snapshot;
    for (int pass = 0; pass < passes; ++pass) {
        const double flip_p = 0.5 * std::min(1.0, jitter - pass);
        snapshot.assign(mask.data().begin(), mask.data().end());
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const std::uint8_t v = snapshot[i];
                std::uint8_t neighbors[4];
                int n_diff = 0;
                if (x > 0 && snapshot[i - 1] != v)
                    neighbors[n_diff++] = snapshot[i - 1];
                if (x + 1 < w && snapshot[i + 1] != v)
                    neighbors[n_diff++] = snapshot[i + 1];
                if (y > 0 && snapshot[i - w] != v)
                    neighbors[n_diff++] = snapshot[i - w];
                if (y + 1 < h && snapshot[i + w] != v)
                    neighbors[n_diff++] = snapshot[i + w];
                if (n_diff == 0) continue;
                if (!rng.next_bool(flip_p)) continue;
                const std::uint8_t pick = neighbors[rng.next_below(
                    static_cast<std::uint64_t>(n_diff))];
                mask.mutable_data()[i] = pick;
            }
        }
    }
}

void apply_blobs(LabelMask& mask, const NoiseModel& noise, Rng& rng) {
    const int w = mask.width();
    const int h = mask.height();
    const std::uint64_t count = rng.poisson(noise.blob_rate);
    for (std::uint64_t b = 0; b < count; ++b) {
        const int cx = static_cast<int>(rng.next_below(w));
        const int cy = static_cast<int>(rng.next_below(h));
        const double r =
            noise.blob_min + rng.next_unit() * (noise.blob_max - noise.blob_min);
        const std::uint8_t cls = static_cast<std::uint8_t>(
            rng.next_below(static_cast<std::uint64_t>(mask.num_classes())));
        const int ir = static_cast<int>(std::ceil(r));
        const double r2 = r * r;
        for (int y = std::max(0, cy - ir); y <= std::min(h - 1, cy + ir); ++y) {
            for (int x = std::max(0, cx - ir); x <= std::min(w - 1, cx + ir);
                 ++x) {
                const double dx = x - cx;
                const double dy = y - cy;
                if (dx * dx + dy * dy <= r2) mask.set(x, y, cls);
            }
        }
    }
}

void apply_confusion(LabelMask& mask, const NoiseModel& noise, Rng& rng) {
    if (noise.confusion_bias.empty()) return;
    const int c = mask.num_classes();
    auto data = mask.mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::uint8_t cur = data[i];
        const double u = rng.next_unit();
        const double* row = noise.confusion_bias.data() +
                            static_cast<std::size_t>(cur) * c;
        double cum = 0.0;
        int picked = cur;
        for (int k = 0; k < c; ++k) {
            cum += row[k];
            if (u < cum) {
                picked = k;
                break;
            }
        }
        data[i] = static_cast<std::uint8_t>(picked);
    }
}

ProbMap emit_probabilities(const LabelMask& labels, double temperature,
                           Rng& rng) {
    const int c = labels.num_classes();
    const double t = std::max(kMinTemperature, temperature);
    ProbMap prob(labels.width(), labels.height(), c);
    std::vector<double> logits(c);
    std::vector<double> probs(c);
    const auto data = labels.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int l = data[i];
        double max_logit = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < c; ++k) {
            const double onehot = k == l ? 1.0 : 0.0;
            logits[k] = (onehot + kLogitNoise * rng.next_unit()) / t;
            max_logit = std::max(max_logit, logits[k]);
        }
        double sum = 0.0;
        for (int k = 0; k < c; ++k) {
            probs[k] = std::exp(logits[k] - max_logit);
            sum += probs[k];
        }
        float* out = prob.mutable_row(i);
        for (int k = 0; k < c; ++k)
            out[k] = static_cast<float>(probs[k] / sum);
        // float rounding could in principle tie the winner with a lower
        // index; nudge until the argmax matches the label
        for (;;) {
            int am = 0;
            for (int k = 1; k < c; ++k)
                if (out[k] > out[am]) am = k;
            if (am == l) break;
            out[l] = std::nextafter(
                std::max(out[l], out[am]), 2.0f);
        }
    }
    return prob;
}

}  // namespace

std::pair<LabelMask, ProbMap> corrupt(const LabelMask& gt,
                                      const NoiseModel& noise,
                                      std::uint64_t index) {
    noise.validate(gt.num_classes());
    for (std::size_t i = 0; i < gt.pixel_count(); ++i)
        if (gt[i] == kIgnoreLabel)
            raise(ErrorCode::Domain,
                  "corrupt() expects a ground truth without ignore pixels");

    Rng rng(derive_seed(noise.seed, index, "corrupt"));
    LabelMask pred = gt;
    // draw order is part of the format: jitter, blobs, confusion, then the
    // probability raster
    apply_boundary_jitter(pred, noise.boundary_jitter, rng);
    apply_blobs(pred, noise, rng);
    apply_confusion(pred, noise, rng);
    ProbMap prob = emit_probabilities(pred, noise.temperature, rng);
    return {std::move(pred), std::move(prob)};
}

std::vector<PairedSample> gen_paired_dataset(const SceneConfig& scene_cfg,
                                             const ShiftConfig& shift_cfg,
                                             std::size_t n) {
    scene_cfg.validate();
    if (n == 0)
        raise(ErrorCode::InvalidConfig, "dataset size must be >= 1");
    const std::uint64_t master = shift_cfg.base.seed;

    NoiseModel real_model = shift_cfg.base;
    real_model.seed = derive_seed(master, 0, "channel-real");
    NoiseModel syn_model =
        interpolate(shift_cfg.base, shift_cfg.shifted, shift_cfg.delta);
    syn_model.seed = derive_seed(master, 0, "channel-synthetic");
    real_model.validate(scene_cfg.num_classes);
    syn_model.validate(scene_cfg.num_classes);

    std::vector<PairedSample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PairedSample s;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "sample_%05zu", i);
        s.sample_id = buf;
        s.gt = gen_scene(scene_cfg, i);
        auto [pr, pp] = corrupt(s.gt, real_model, i);
        if (shift_cfg.shared_realization) {
            s.pred_syn = pr;
            s.prob_syn = pp;
        } else {
            auto [ps, sp] = corrupt(s.gt, syn_model, i);
            s.pred_syn = std::move(ps);
            s.prob_syn = std::move(sp);
        }
        s.pred_real = std::move(pr);
        s.prob_real = std::move(pp);
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace segtransfer
