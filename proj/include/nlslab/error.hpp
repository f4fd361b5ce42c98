#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlslab {

enum class ErrorKind {
  structural,          // mismatched grids or lengths
  usage,               // bad arguments or configuration
  solver,              // shooting bracket or Newton failure
  accuracy,            // result violates its accuracy invariant
  spectral,            // no unstable eigenvalue found
  nonsimple_spectrum,  // more than one unstable eigenvalue in the radial sector
  resolvent,           // singular or ill-conditioned resolvent
  domain,              // argument outside the mathematical domain
  precondition,        // caller-enforced constraint violated
  resolution,          // grid cannot represent the requested field
  fit,                 // modulation fit did not converge
  degenerate_input,
  insufficient_data,
  cutoff_unresolved,
  preparation,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nlslab
