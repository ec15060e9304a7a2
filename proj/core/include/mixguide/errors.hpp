#pragma once

#include <stdexcept>
#include <string>

namespace mixguide {

// Error taxonomy maps 1:1 onto CLI exit codes: parse 2, constraint 3,
// invariant 4. Everything user-recoverable derives from one of these.

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ConstraintError : std::runtime_error {
  explicit ConstraintError(const std::string& what) : std::runtime_error(what) {}
};

struct InvariantError : std::runtime_error {
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitConstraint = 3;
inline constexpr int kExitInvariant = 4;

}  // namespace mixguide
