#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace smca {

/// Malformed input file. Carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::uint64_t line, const std::string& what)
        : std::runtime_error(source + " line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::uint64_t line() const { return line_; }

private:
    std::uint64_t line_;
};

/// Structurally well-formed input that violates a model invariant
/// (row sums off, bad indices, inconsistent parameters, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A linear system that should be regular came out singular, or an
/// iterative solve failed to converge. Always a hard fault.
class SingularSystem : public std::runtime_error {
public:
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

/// A sampled path exceeded the hard step cap before deciding.
class DivergedError : public std::runtime_error {
public:
    DivergedError(std::uint64_t path_index, std::uint64_t max_steps)
        : std::runtime_error("path " + std::to_string(path_index) + " exceeded " +
                             std::to_string(max_steps) + " steps without a verdict"),
          path_index_(path_index) {}

    std::uint64_t path_index() const { return path_index_; }

private:
    std::uint64_t path_index_;
};

} // namespace smca
