#include "segtransfer/raster.hpp"

#include <cmath>
#include <cstring>

#include "segtransfer/simd/kernels.hpp"

namespace segtransfer {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Congruence: return "congruence";
        case ErrorCode::Domain: return "domain";
        case ErrorCode::EmptyDataset: return "empty-dataset";
        case ErrorCode::UndefinedScore: return "undefined-score";
        case ErrorCode::UndefinedCorrelation: return "undefined-correlation";
        case ErrorCode::InsufficientData: return "insufficient-data";
        case ErrorCode::DegenerateData: return "degenerate-data";
        case ErrorCode::NoRule: return "no-rule";
        case ErrorCode::Registry: return "registry";
        case ErrorCode::MissingFile: return "missing-file";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::InvalidClassValue: return "invalid-class-value";
        case ErrorCode::ArgmaxMismatch: return "argmax-mismatch";
        case ErrorCode::CorruptFile: return "corrupt-file";
        case ErrorCode::MissingProbabilities: return "missing-probabilities";
        case ErrorCode::InvalidConfig: return "invalid-config";
        case ErrorCode::Io: return "io";
        case ErrorCode::Usage: return "usage";
    }
    return "?";
}

namespace {

void check_dims(int width, int height, int num_classes) {
    if (width <= 0 || height <= 0)
        raise(ErrorCode::Domain, "raster dimensions must be positive");
    if (num_classes < 1 || num_classes > 254)
        raise(ErrorCode::Domain,
              "num_classes must be in [1, 254] (255 is the ignore label)");
}

}  // namespace

LabelMask::LabelMask(int width, int height, int num_classes, std::uint8_t fill)
    : width_(width), height_(height), num_classes_(num_classes),
      data_(static_cast<std::size_t>(width) * height, fill) {
    check_dims(width, height, num_classes);
}

LabelMask::LabelMask(int width, int height, int num_classes,
                     std::vector<std::uint8_t> data)
    : width_(width), height_(height), num_classes_(num_classes),
      data_(std::move(data)) {
    check_dims(width, height, num_classes);
    if (data_.size() != static_cast<std::size_t>(width) * height)
        raise(ErrorCode::DimensionMismatch,
              "label data length does not match width*height");
}

void LabelMask::require_congruent(const LabelMask& other) const {
    if (!congruent_with(other))
        raise(ErrorCode::Congruence,
              "masks disagree on dimensions or class count");
}

void LabelMask::validate() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        const std::uint8_t v = data_[i];
        if (v >= num_classes_ && v != kIgnoreLabel)
            raise(ErrorCode::InvalidClassValue,
                  "invalid class value " + std::to_string(v) + " at pixel (" +
                      std::to_string(i % width_) + ", " +
                      std::to_string(i / width_) + ")");
    }
}

ProbMap::ProbMap(int width, int height, int num_classes)
    : width_(width), height_(height), num_classes_(num_classes),
      data_(static_cast<std::size_t>(width) * height * num_classes, 0.0f) {
    check_dims(width, height, num_classes);
}

ProbMap::ProbMap(int width, int height, int num_classes,
                 std::vector<float> data)
    : width_(width), height_(height), num_classes_(num_classes),
      data_(std::move(data)) {
    check_dims(width, height, num_classes);
    if (data_.size() !=
        static_cast<std::size_t>(width) * height * num_classes)
        raise(ErrorCode::DimensionMismatch,
              "probability data length does not match width*height*C");
}

void ProbMap::validate() const {
    const std::size_t n = pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const float* r = row(i);
        double sum = 0.0;
        for (int k = 0; k < num_classes_; ++k) {
            const float p = r[k];
            if (!(p >= 0.0f && p <= 1.0f))
                raise(ErrorCode::InvalidClassValue,
                      "probability outside [0,1] at pixel " + std::to_string(i));
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-4)
            raise(ErrorCode::InvalidClassValue,
                  "probabilities at pixel " + std::to_string(i) +
                      " sum to " + std::to_string(sum));
    }
}

void PairedSample::validate() const {
    gt.require_congruent(pred_real);
    gt.require_congruent(pred_syn);
    gt.validate();
    pred_real.validate();
    pred_syn.validate();

    auto check_prob = [&](const std::optional<ProbMap>& prob,
                          const LabelMask& pred, const char* tag) {
        if (!prob) return;
        if (prob->width() != gt.width() || prob->height() != gt.height() ||
            prob->num_classes() != gt.num_classes())
            raise(ErrorCode::Congruence,
                  std::string("probability raster (") + tag +
                      ") disagrees with mask dimensions");
        prob->validate();
        std::vector<std::uint8_t> am(prob->pixel_count());
        simd::argmax_rows(prob->data().data(), prob->pixel_count(),
                          prob->num_classes(), am.data());
        const auto pd = pred.data();
        for (std::size_t i = 0; i < am.size(); ++i) {
            if (am[i] != pd[i])
                raise(ErrorCode::ArgmaxMismatch,
                      std::string("argmax of ") + tag +
                          " probabilities disagrees with prediction at pixel " +
                          std::to_string(i));
        }
    };
    check_prob(prob_real, pred_real, "real");
    check_prob(prob_syn, pred_syn, "synthetic");
}

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : num_classes_(num_classes),
      counts_(static_cast<std::size_t>(num_classes) * num_classes, 0),
      invalid_(num_classes, 0) {
    if (num_classes < 1)
        raise(ErrorCode::Domain, "confusion matrix needs at least one class");
}

std::int64_t ConfusionMatrix::gt_count(int c) const {
    std::int64_t sum = invalid_[c];
    for (int k = 0; k < num_classes_; ++k) sum += at(c, k);
    return sum;
}

std::int64_t ConfusionMatrix::pred_count(int k) const {
    std::int64_t sum = 0;
    for (int c = 0; c < num_classes_; ++c) sum += at(c, k);
    return sum;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (num_classes_ != other.num_classes_)
        raise(ErrorCode::Congruence, "confusion matrices of different size");
    for (std::size_t i = 0; i < counts_.size(); ++i)
        counts_[i] += other.counts_[i];
    for (int c = 0; c < num_classes_; ++c) invalid_[c] += other.invalid_[c];
    return *this;
}

}  // namespace segtransfer
