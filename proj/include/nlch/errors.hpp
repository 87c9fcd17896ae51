#pragma once

#include <stdexcept>
#include <string>

namespace nlch {

/// Bad or inconsistent user input (config files, CLI values, malformed tables).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A linear solve failed: CG hit max iterations, broke down, or the dense
/// factorization produced an unusable result.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A runtime invariant of the scheme was violated (e.g. the modified energy
/// increased beyond slack). Indicates a bug or a misconfigured run, never
/// normal operation.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nlch
