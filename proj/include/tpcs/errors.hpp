#pragma once

#include <stdexcept>
#include <string>

namespace tpcs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent model: bad reference, arithmetic overflow,
/// domain violation, unsatisfiable initial condition.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Invalid argument passed to an operation (caller bug, not model bug).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// API misuse violating a documented precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Syntax or validation failure in an input document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Inconsistent event catalog (e.g. conflicting parameter arity).
class CatalogError : public Error {
public:
    using Error::Error;
};

/// Ill-formed property or reference to an undeclared atom/channel.
class PropertyError : public Error {
public:
    using Error::Error;
};

/// Malformed observation stream (e.g. decreasing timestamps).
class TraceError : public Error {
public:
    using Error::Error;
};

} // namespace tpcs
