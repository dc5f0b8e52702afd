#pragma once

#include <stdexcept>
#include <string>

namespace netsentinel {

// Error taxonomy shared by the whole library. The CLI maps these onto its
// exit codes: ConfigError -> 1, IoError -> 3, anything else derived from
// Error -> 2.

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid parameter or input value, caught before any real work starts.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input data was readable but does not conform to the expected format.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Operation requires a connected graph.
class NotConnectedError : public Error {
public:
    using Error::Error;
};

/// A vertex sequence is not a path of the graph.
class InvalidPathError : public Error {
public:
    using Error::Error;
};

/// No admissible path exists between the requested endpoints.
class NoPathError : public Error {
public:
    using Error::Error;
};

/// Destination exists but cannot be reached from the source.
class UnreachableError : public Error {
public:
    using Error::Error;
};

/// A numerical kernel produced an unusable result (singular solve, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An iterative method exhausted its iteration budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Random topology generation could not satisfy its constraints.
class TopologyError : public Error {
public:
    using Error::Error;
};

} // namespace netsentinel
