#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace srl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t actual, const std::string& where)
        : Error(where + ": dimension mismatch (expected " + std::to_string(expected) + ", got " +
                std::to_string(actual) + ")"),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const { return expected_; }
    std::size_t actual() const { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Raised when a composition or pushforward produces a polynomial whose total
/// degree exceeds the configured cap. Results are never silently truncated.
class DegreeOverflow : public Error {
public:
    DegreeOverflow(unsigned degree, unsigned limit)
        : Error("degree overflow: result degree " + std::to_string(degree) + " exceeds cap " +
                std::to_string(limit)),
          degree_(degree), limit_(limit) {}

    unsigned degree() const { return degree_; }
    unsigned limit() const { return limit_; }

private:
    unsigned degree_;
    unsigned limit_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          message_(message), line_(line), column_(column) {}

    const std::string& message() const { return message_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

/// The bracket-generating condition failed at the base point within the
/// allowed depth. Carries the flag dimensions (d_1, ..., d_maxDepth) reached.
class HormanderFailure : public Error {
public:
    HormanderFailure(std::vector<std::size_t> flag, std::size_t dim);

    const std::vector<std::size_t>& flag() const { return flag_; }
    std::size_t dim() const { return dim_; }

private:
    std::vector<std::size_t> flag_;
    std::size_t dim_;
};

class ChartConstructionFailure : public Error {
public:
    ChartConstructionFailure(std::size_t coordinate, std::size_t word_length, unsigned max_degree)
        : Error("no polynomial correction of degree <= " + std::to_string(max_degree) +
                " for coordinate " + std::to_string(coordinate + 1) + " at word length " +
                std::to_string(word_length)),
          coordinate_(coordinate), word_length_(word_length) {}

    std::size_t coordinate() const { return coordinate_; }
    std::size_t word_length() const { return word_length_; }

private:
    std::size_t coordinate_;
    std::size_t word_length_;
};

class SimulationError : public Error {
public:
    using Error::Error;
};

class EstimationError : public Error {
public:
    using Error::Error;
};

}  // namespace srl
