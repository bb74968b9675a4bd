#ifndef JETCALC_ERRORS_HPP
#define JETCALC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetcalc {

// Root of the library's error hierarchy.
struct JetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: bad syntax, out-of-range indices, wrong shapes. The CLI
// maps these to exit code 2.
struct InputError : JetError {
  using JetError::JetError;
};

// A syntax error with the offset (0-based) into the offending text.
struct ParseError : InputError {
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

struct InvalidIndex : InputError {
  using InputError::InputError;
};

struct OrderExceeded : InputError {
  using InputError::InputError;
};

struct ShapeError : InputError {
  using InputError::InputError;
};

struct SymmetryError : InputError {
  using InputError::InputError;
};

struct BasisMismatch : InputError {
  using InputError::InputError;
};

// A documented precondition of an operation does not hold for the given
// (well-formed) input. The CLI maps these to exit code 3.
struct PreconditionError : JetError {
  using JetError::JetError;
};

struct NotContact : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct NotInKernel : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct DegreeTooLow : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct ShapeConstraint : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct NonPolynomialInFibre : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct UnboundGenerator : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct OrderMismatch : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct UnsupportedBaseMap : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct SingularJacobian : PreconditionError {
  using PreconditionError::PreconditionError;
};

// Division is supported only by rational constants. Raised either while
// parsing (then treated as malformed input) or when a derivative would need a
// reciprocal (then treated as a precondition failure); the CLI distinguishes
// the two by phase.
struct UnsupportedDivision : JetError {
  using JetError::JetError;
};

}  // namespace jetcalc

#endif
