#pragma once

#include <stdexcept>
#include <string>

namespace edapp {

// Bad user input: malformed files, violated invariants, infeasible configs.
// The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Infeasible or inconsistent configuration (a flavor of validation error).
class ConfigError : public ValidationError {
public:
    explicit ConfigError(const std::string& what) : ValidationError(what) {}
};

// A subject whose data cannot support the requested computation
// (e.g. fewer than two answered trials for the reaction-time z-score).
class DegenerateSubjectError : public ValidationError {
public:
    explicit DegenerateSubjectError(const std::string& what) : ValidationError(what) {}
};

// A requested feature set cannot be assembled for a subject (missing
// annotations). Callers may exclude the subject instead of aborting.
class FeatureUnavailableError : public ValidationError {
public:
    explicit FeatureUnavailableError(const std::string& what) : ValidationError(what) {}
};

// Non-finite objectives, failed optimizations, unsatisfied KKT conditions.
// The CLI maps these to exit code 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace edapp
