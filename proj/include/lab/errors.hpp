#pragma once
#include <stdexcept>
#include <string>

namespace lab {

// Every failure the library can signal deliberately.  The CLI maps a subset
// of these to process exit codes; everything else is a plain code-1 failure.
enum class Err {
  invalid_parameter,   // rejected config / argument values
  symmetry_violation,  // Hermitian symmetry broken on a claimed-real field
  shape_mismatch,      // fields on different grids combined
  axis_range,          // derivative axis outside {0,1,2}
  bad_shell_index,     // shell q < -1
  construction,        // internal consistency failure while building data
  resolution,          // requested shells do not fit the dealiased band
  insufficient_data,   // not enough shells/samples for a requested fit
  budget_exceeded,     // enumeration refused: support product too large
  cfl_rejected,        // explicit step size fails the advective CFL bound
  blow_up,             // solution left the trusted regime mid-run
  missing_artifact,    // report asked for a file the run never produced
  io_failure,          // filesystem / serialization trouble
};

struct Error : std::runtime_error {
  Err code;
  Error(Err c, const std::string& what) : std::runtime_error(what), code(c) {}
};

[[noreturn]] inline void fail(Err c, const std::string& msg) { throw Error(c, msg); }

inline const char* err_name(Err c) {
  switch (c) {
    case Err::invalid_parameter:  return "invalid_parameter";
    case Err::symmetry_violation: return "symmetry_violation";
    case Err::shape_mismatch:     return "shape_mismatch";
    case Err::axis_range:         return "axis_range";
    case Err::bad_shell_index:    return "bad_shell_index";
    case Err::construction:       return "construction";
    case Err::resolution:         return "resolution";
    case Err::insufficient_data:  return "insufficient_data";
    case Err::budget_exceeded:    return "budget_exceeded";
    case Err::cfl_rejected:       return "cfl_rejected";
    case Err::blow_up:            return "blow_up";
    case Err::missing_artifact:   return "missing_artifact";
    case Err::io_failure:         return "io_failure";
  }
  return "unknown";
}

}  // namespace lab
