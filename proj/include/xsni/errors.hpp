#pragma once

#include <stdexcept>
#include <string>

namespace xsni {

// Base class for all recoverable errors raised on bad input. CLI maps these
// to exit code 2; anything else escaping to main is an internal error (3).
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed documents, records, hostnames, wire bytes.
class ParseError : public Error {
public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// Structurally valid input that violates a domain invariant
// (cycles in a tree, unknown hostname, unknown cost-table row).
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Inconsistent server/protocol configuration, rejected at construction.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

} // namespace xsni
