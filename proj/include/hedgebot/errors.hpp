#pragma once

#include <stdexcept>
#include <string>

namespace hedgebot {

// Input data violates a documented invariant (bad shapes, off-simplex
// weights, duplicate dates, ...). Maps to CLI exit code 1.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A file could not be decoded. Carries the offending row where known.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called out of order (e.g. backward without forward).
struct StateError : std::runtime_error {
  explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hedgebot
