#pragma once

#include <stdexcept>
#include <string>

namespace memlens {

/// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input (files, models, filter expressions).
class InputError : public Error {
public:
    using Error::Error;
};

/// No samples are left for estimation after windowing and filtering.
class NoSamplesError : public Error {
public:
    using Error::Error;
};

/// The capacity search exceeded its configured node budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

}  // namespace memlens
