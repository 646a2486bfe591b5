#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segtransfer/errors.hpp"

namespace segtransfer {

// Reserved label for pixels excluded from every count.
inline constexpr std::uint8_t kIgnoreLabel = 255;

// H x W raster of class identifiers, row-major, one byte per pixel.
// Valid values are [0, num_classes) plus kIgnoreLabel.
class LabelMask {
public:
    LabelMask() = default;
    LabelMask(int width, int height, int num_classes, std::uint8_t fill = 0);
    LabelMask(int width, int height, int num_classes,
              std::vector<std::uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int num_classes() const { return num_classes_; }
    std::size_t pixel_count() const { return data_.size(); }

    std::uint8_t at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    void set(int x, int y, std::uint8_t v) {
        data_[static_cast<std::size_t>(y) * width_ + x] = v;
    }
    std::uint8_t operator[](std::size_t i) const { return data_[i]; }

    std::span<const std::uint8_t> data() const { return data_; }
    std::span<std::uint8_t> mutable_data() { return data_; }

    bool congruent_with(const LabelMask& other) const {
        return width_ == other.width_ && height_ == other.height_ &&
               num_classes_ == other.num_classes_;
    }
    // Throws Congruence if dims or class counts differ.
    void require_congruent(const LabelMask& other) const;

    // Throws InvalidClassValue naming the first offending pixel.
    void validate() const;

private:
    int width_ = 0;
    int height_ = 0;
    int num_classes_ = 0;
    std::vector<std::uint8_t> data_;
};

// H x W x C raster of per-pixel class probabilities, row-major with the
// class index fastest; each pixel's C values sum to one.
class ProbMap {
public:
    ProbMap() = default;
    ProbMap(int width, int height, int num_classes);
    ProbMap(int width, int height, int num_classes, std::vector<float> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int num_classes() const { return num_classes_; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width_) * height_;
    }

    const float* row(std::size_t pixel) const {
        return data_.data() + pixel * num_classes_;
    }
    float* mutable_row(std::size_t pixel) {
        return data_.data() + pixel * num_classes_;
    }
    std::span<const float> data() const { return data_; }

    // Range check plus per-pixel sum check (tolerance 1e-4).
    void validate() const;

private:
    int width_ = 0;
    int height_ = 0;
    int num_classes_ = 0;
    std::vector<float> data_;
};

// Shared ground truth with one prediction per domain; the unit of
// transferability analysis.
struct PairedSample {
    std::string sample_id;
    LabelMask gt;
    LabelMask pred_real;
    LabelMask pred_syn;
    std::optional<ProbMap> prob_real;
    std::optional<ProbMap> prob_syn;

    bool has_probs() const { return prob_real.has_value() && prob_syn.has_value(); }

    // Congruence across all rasters, value ranges, and argmax consistency of
    // any probability raster with its label raster.
    void validate() const;
};

// C x C counts; entry (c, k) = pixels with ground truth c predicted as k.
// Pixels whose ground truth is the ignore label contribute nowhere. Pixels
// whose *prediction* is the ignore label are tallied per ground-truth class
// in a separate invalid column so row sums stay reconstructible.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int num_classes);

    int num_classes() const { return num_classes_; }

    std::int64_t at(int gt_class, int pred_class) const {
        return counts_[static_cast<std::size_t>(gt_class) * num_classes_ + pred_class];
    }
    std::int64_t& at(int gt_class, int pred_class) {
        return counts_[static_cast<std::size_t>(gt_class) * num_classes_ + pred_class];
    }
    std::int64_t invalid(int gt_class) const { return invalid_[gt_class]; }
    std::int64_t& invalid(int gt_class) { return invalid_[gt_class]; }

    // |Y_c| including pixels predicted as ignore.
    std::int64_t gt_count(int c) const;
    // Pixels predicted as k over non-ignore ground truth.
    std::int64_t pred_count(int k) const;

    std::span<const std::int64_t> counts() const { return counts_; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& other);

private:
    int num_classes_ = 0;
    std::vector<std::int64_t> counts_;
    std::vector<std::int64_t> invalid_;
};

}  // namespace segtransfer
