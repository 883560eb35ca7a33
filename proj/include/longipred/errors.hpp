#pragma once

#include <stdexcept>
#include <string>

namespace longipred {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (bad cell, missing header, bad schema).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structural violation of a dataset or model invariant.
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Input too small for the requested operation.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Rank-deficient design matrix.
class DegenerateDesignError : public Error {
public:
    using Error::Error;
};

/// A column cannot be imputed (e.g. no observed entries at all).
class UnimputableError : public Error {
public:
    using Error::Error;
};

/// Feature screening cannot satisfy the request.
class SelectionError : public Error {
public:
    using Error::Error;
};

/// Requested statistic is undefined for the given input.
class UndefinedError : public Error {
public:
    using Error::Error;
};

/// Evaluation harness failure (e.g. too many failed replicates).
class HarnessError : public Error {
public:
    using Error::Error;
};

}  // namespace longipred
