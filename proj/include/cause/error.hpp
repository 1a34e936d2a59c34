#pragma once

#include <stdexcept>
#include <string>

namespace cause {

// Typed failure kinds surfaced by the library. The CLI maps these onto
// process exit codes (config -> 2, numerical -> 3, everything else -> 1).
enum class ErrorKind {
    MalformedLine,
    EmptyInput,
    EmptySet,
    LengthMismatch,
    SingleClass,
    ZeroBaseline,
    DegeneratePool,
    EmptyTrainingSet,
    NoPositives,
    EmptyTreatmentSample,
    ZeroPropensity,
    ShapeMismatch,
    ConfigError,
    IoError,
    NumericalFailure,
    FormatError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::MalformedLine: return "MalformedLine";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::EmptySet: return "EmptySet";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::SingleClass: return "SingleClass";
        case ErrorKind::ZeroBaseline: return "ZeroBaseline";
        case ErrorKind::DegeneratePool: return "DegeneratePool";
        case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorKind::NoPositives: return "NoPositives";
        case ErrorKind::EmptyTreatmentSample: return "EmptyTreatmentSample";
        case ErrorKind::ZeroPropensity: return "ZeroPropensity";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
        case ErrorKind::FormatError: return "FormatError";
    }
    return "Unknown";
}

}  // namespace cause
