#pragma once

#include <stdexcept>
#include <string>

namespace robcurve {

/// Invalid argument or configuration. CLI exit code 2.
class input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A requested computation would exceed a configured resource cap. CLI exit code 3.
class cap_exceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative numeric procedure failed to reach its tolerance. CLI exit code 4.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal consistency violation (non-finite draw, undecodable state). CLI exit code 4.
class internal_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace robcurve
