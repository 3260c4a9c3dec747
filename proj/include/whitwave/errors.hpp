#pragma once

#include <stdexcept>
#include <string>

namespace whitwave {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad config values, unreadable files, grid mismatches.
class InputError : public Error {
public:
    using Error::Error;
};

// A numerical procedure could not deliver a trustworthy result
// (Newton divergence, singular block, vanishing resolvent denominator...).
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace whitwave
