#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gcbg {

// Root of the library's exception hierarchy.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input records that cannot be turned into a canonical GameInstance.
struct ValidationError : Error {
    using Error::Error;
};

// Some valuation is non-positive or non-finite.
struct ValuationError : ValidationError {
    using ValidationError::ValidationError;
};

// Valuations do not sum to one within tolerance.
struct NormalizationError : ValidationError {
    using ValidationError::ValidationError;
};

// Budget difference D outside the admissible interval (0, (n-1) R^b).
struct ResourceBoundError : ValidationError {
    using ValidationError::ValidationError;
};

// Vector length does not match the instance.
struct DimensionError : ValidationError {
    using ValidationError::ValidationError;
};

// Scalar argument outside its documented range.
struct RangeError : ValidationError {
    using ValidationError::ValidationError;
};

struct SingularityError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

struct NoSolutionError : Error {
    using Error::Error;
};

struct ThresholdError : Error {
    using Error::Error;
};

struct BaseAllocationError : Error {
    using Error::Error;
};

struct StationarityError : Error {
    using Error::Error;
};

struct GridError : Error {
    using Error::Error;
};

struct GridTooLargeError : Error {
    GridTooLargeError(const std::string& what, std::uint64_t size)
        : Error(what), grid_size(size) {}
    std::uint64_t grid_size = 0;
};

struct ParseError : Error {
    explicit ParseError(const std::string& what, int line_number = 0)
        : Error(what), line(line_number) {}
    int line = 0;
};

}  // namespace gcbg
