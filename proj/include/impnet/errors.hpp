#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace impnet {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed netlist text. Carries the 1-based line number.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structurally invalid input: self-loop, node out of range, bad element value, bad generator parameters.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The branch graph does not connect every node.
class DisconnectedError : public Error {
public:
    using Error::Error;
};

/// An element whose admittance is undefined (zero impedance).
class DegenerateElementError : public Error {
public:
    using Error::Error;
};

class InvalidNodeError : public Error {
public:
    using Error::Error;
};

/// Iterative eigensolver exhausted its sweep budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

class NotSymmetricError : public Error {
public:
    using Error::Error;
};

/// Degenerate-cluster construction produced a vanishing vector for every trial phase.
class DegenerateConstructionError : public Error {
public:
    using Error::Error;
};

/// No zero mode overlaps the constant vector: the input is not a network Laplacian.
class NoTrivialZeroError : public Error {
public:
    using Error::Error;
};

/// A quantity was requested too close to a singular point (e.g. on a resonance).
class NearSingularError : public Error {
public:
    using Error::Error;
};

}  // namespace impnet
