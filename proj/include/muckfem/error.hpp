#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace muckfem {

enum class ErrorCode {
  NonIntegrable,
  UnsupportedDomain,
  UnsupportedWeight,
  UnsupportedPair,
  DerivativeUnavailable,
  QuadratureFailure,
  PointOutsideMesh,
  PointOnBoundary,
  SingularAssembly,
  SingularMatrix,
  SolverDiverged,
  InvalidGrading,
  DegenerateFit,
  InvalidArgument,
  ConfigError,
  IOError,
};

std::string_view toString(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(toString(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace muckfem
