#pragma once

#include <stdexcept>
#include <string>

namespace simplex {

// Malformed input files, inconsistent corpora, bad parameter ranges.
// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Sampling or evaluation cannot proceed numerically. CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace simplex
