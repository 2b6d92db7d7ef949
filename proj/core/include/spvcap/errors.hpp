#pragma once

#include <stdexcept>
#include <string>

namespace spvcap {

/// Input data or upstream artifact is absent (file not found, missing column,
/// missing national capacity for a requested year). CLI exit code 3.
class MissingInputError : public std::runtime_error {
public:
    explicit MissingInputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Model and data disagree on schema (feature set, file format version).
/// CLI exit code 2.
class SchemaMismatchError : public std::runtime_error {
public:
    explicit SchemaMismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spvcap
