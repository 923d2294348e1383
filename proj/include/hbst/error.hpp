#pragma once

#include <stdexcept>
#include <string>

namespace hbst {

// Caller violated a precondition (width mismatch, bad parameter, ...).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed, truncated or version-mismatched serialized data.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Internal invariant broken, e.g. a tree result that is not a subset of the
// brute-force result.
class ConsistencyError : public std::logic_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace hbst
