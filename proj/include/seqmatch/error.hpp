#pragma once

#include <stdexcept>
#include <string>

namespace seqmatch {

// Raised when an argument violates an operation's precondition
// (dimension mismatch, empty trajectory, non-finite values, bad config).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when an internal consistency check fails (a bug, not bad input).
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace seqmatch
