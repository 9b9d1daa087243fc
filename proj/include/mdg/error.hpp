#pragma once

#include <stdexcept>
#include <string>

namespace mdg {

// Error categories map onto CLI exit codes: usage 1, data 2, numeric 3.

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

inline void require(bool cond, const std::string &what) {
    if (!cond) throw UsageError(what);
}

inline void require_dims(bool cond, const std::string &what) {
    if (!cond) throw DimensionError(what);
}

} // namespace mdg
