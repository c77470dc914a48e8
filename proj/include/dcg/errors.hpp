#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcg {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejected arguments or violated preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed input file. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
public:
    enum class Kind { MalformedHeader, MalformedBody, ColumnOutOfRange, NegativeValue, NonzeroCountMismatch, RowCountMismatch, Io };

    ParseError(Kind kind, std::size_t line, const std::string& what);

    Kind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

/// Iterative numerical routine failed.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, long iterations = -1);

    long iterations() const noexcept { return iterations_; }

private:
    long iterations_;
};

/// A graph or feature matrix contains nodes that cannot be used (zero rows, zero degree).
class DegenerateNodes : public Error {
public:
    DegenerateNodes(const std::string& what, std::vector<std::size_t> nodes);

    const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

private:
    std::vector<std::size_t> nodes_;
};

/// Error wrapped with the name of the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what);

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

} // namespace dcg
