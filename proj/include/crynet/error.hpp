#pragma once

#include <stdexcept>
#include <string>

namespace crynet {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file; the message names the offending chunk/row/field.
struct ParseError : Error {
    using Error::Error;
};

// Valid container, codec or layout we do not handle.
struct UnsupportedFormatError : Error {
    using Error::Error;
};

// Tensor/shape disagreement; the message carries both shapes.
struct DimensionError : Error {
    using Error::Error;
};

// Bad arguments, configs or manifest semantics caught before any work runs.
struct ValidationError : Error {
    using Error::Error;
};

// Filesystem failure mid-run.
struct IoError : Error {
    using Error::Error;
};

// Non-finite loss or gradient during training.
struct DivergenceError : Error {
    using Error::Error;
};

}  // namespace crynet
