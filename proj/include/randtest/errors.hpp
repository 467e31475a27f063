#pragma once

#include <stdexcept>

namespace randtest {

// Error taxonomy. The CLI maps these onto distinct exit codes, so keep the
// hierarchy flat and specific.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument to a constructor or operation (odd n, malformed pattern, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

// Malformed input file (CSV data, config, element list).
struct ParseError : Error {
  using Error::Error;
};

// The observed assignment is not a member of the declared randomization
// scheme. The scheme is fixed before treatments are administered; changing it
// afterwards is a hard error, not a warning.
struct DesignViolation : Error {
  using Error::Error;
};

// A transformation set handed to the invariance test failed one of the group
// axioms. The message names the failed axiom and a witness.
struct GroupStructureViolation : Error {
  using Error::Error;
};

// Scheme or group too large to enumerate in memory; sampling still works.
struct EnumerationInfeasible : Error {
  using Error::Error;
};

}  // namespace randtest
