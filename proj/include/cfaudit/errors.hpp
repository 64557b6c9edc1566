#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfaudit {

// Base class for all toolkit errors. Subclasses exist so callers can branch
// on the failure kind; the CLI maps them to exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file (schema config, CSV structure, JSON artifact).
struct ParseError : Error {
    using Error::Error;
};

// A schema invariant is violated (duplicate names, empty category list, lo >= hi).
struct SchemaError : Error {
    using Error::Error;
};

// A data cell does not conform to its feature spec. Carries the position of
// the first offending cell (1-based row counting the header as row 1).
struct ValidationError : Error {
    ValidationError(const std::string& msg, std::size_t row, std::size_t column)
        : Error(msg + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
          row(row), column(column) {}
    std::size_t row;
    std::size_t column;
};

// A numeric feature is constant over the normalization reference set.
struct DegenerateRange : Error {
    using Error::Error;
};

// Two instances (or an instance and a context/model) disagree on the schema.
struct SchemaMismatch : Error {
    using Error::Error;
};

// Training data unusable (e.g. a single class present).
struct DegenerateData : Error {
    using Error::Error;
};

struct EmptyData : Error {
    using Error::Error;
};

// A generator exhausted its budget without finding a valid counterfactual.
struct CfNotFound : Error {
    using Error::Error;
};

struct GridTooLarge : Error {
    using Error::Error;
};

// Every generation attempt in a space build failed.
struct EmptySpace : Error {
    using Error::Error;
};

// A record is not a member of the space/ranking it was queried against.
struct NotInSpace : Error {
    using Error::Error;
};

// Sensitive-avoiding selection with fallback=error and no admissible record.
struct NoAdmissibleRecord : Error {
    using Error::Error;
};

// The stated manifest cannot be reproduced by the auditor.
struct RegenerationMismatch : Error {
    using Error::Error;
};

// Fewer sweep runs than the configured minimum.
struct InsufficientSweep : Error {
    using Error::Error;
};

struct EmptySample : Error {
    using Error::Error;
};

// Run configuration is contradictory, incomplete, or carries unknown keys.
struct ConfigError : Error {
    using Error::Error;
};

// A report was requested over a directory with no run outputs.
struct NoRuns : Error {
    using Error::Error;
};

}  // namespace cfaudit
