#pragma once

#include <stdexcept>
#include <string>

namespace t2u {

// Error hierarchy used across the library. Each carries a short machine-readable
// category so the CLI can emit structured failures and map them to exit codes.

class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

// Invalid or inconsistent user-supplied parameters (bad ranges, unknown keys, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// Violations of structural preconditions between objects (dimension mismatches,
// unassigned code rows, beam/stream count conflicts).
class StructureError : public Error {
public:
    explicit StructureError(const std::string& what) : Error("structure", what) {}
};

// File system and serialization failures.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

} // namespace t2u
