#pragma once

#include <stdexcept>
#include <string>

namespace segtransfer {

// Every failure mode the library reports carries one of these codes so the
// CLI (and tests) can map outcomes to exit codes without string matching.
enum class ErrorCode {
    Congruence,            // rasters disagree on dims or class count
    Domain,                // argument outside its valid range (class index, C < 2, ...)
    EmptyDataset,          // operation needs at least one sample
    UndefinedScore,        // no class has a defined IoU for this image
    UndefinedCorrelation,  // constant series or too few points
    InsufficientData,      // split/aggregate got fewer rows than required
    DegenerateData,        // a discriminator class is missing one domain
    NoRule,                // no candidate rule survived the filters
    Registry,              // unknown feature name
    MissingFile,
    DimensionMismatch,
    InvalidClassValue,     // raster pixel outside [0, C) and not the ignore label
    ArgmaxMismatch,        // probability raster disagrees with its label raster
    CorruptFile,
    MissingProbabilities,  // feature extraction requested without a ProbMap
    InvalidConfig,
    Io,
    Usage,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace segtransfer
