#pragma once

#include <stdexcept>
#include <string>

namespace epikl {

// Input that is mathematically degenerate for the requested operation
// (inverting zero, a zero polynomial, a degenerate reference form).
class degenerate_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// (type, n, m, d) that violates a divisor or parity rule.
class classification_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Shapes or arities that do not match the group datum.
class shape_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A verification that cannot be run on this configuration
// (e.g. pencil roots not rational); distinct from a failure.
class inapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Broken internal invariant, e.g. a zero denominator after filtering.
class invariant_violation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace epikl
