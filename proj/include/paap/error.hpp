#ifndef PAAP_ERROR_HPP
#define PAAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace paap {

// Bad caller input: shapes, ranges, mismatched frame counts.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or unsupported file content.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Signal content makes the requested quantity undefined (all-zero RMS,
// non-positive autocorrelation energy, singular normal equations).
struct DegenerateSignalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace paap

#endif
