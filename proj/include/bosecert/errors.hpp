#pragma once

#include <stdexcept>
#include <string>

namespace bosecert {

class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define BOSECERT_ERROR(Name)                                                   \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string& what) : Error(#Name, what) {}             \
  }

BOSECERT_ERROR(NonConvergence);
BOSECERT_ERROR(InvalidPotential);
BOSECERT_ERROR(GridTooCoarse);
BOSECERT_ERROR(QuadratureFailure);
BOSECERT_ERROR(NormalizationFailure);
BOSECERT_ERROR(SupportViolation);
BOSECERT_ERROR(MissingScattering);
BOSECERT_ERROR(GeometryViolation);
BOSECERT_ERROR(DomainError);
BOSECERT_ERROR(NoAdmissiblePair);
BOSECERT_ERROR(TailNotConverged);
BOSECERT_ERROR(GapNotDominating);
BOSECERT_ERROR(DilutenessViolation);
BOSECERT_ERROR(InconsistentInputs);
BOSECERT_ERROR(InfeasiblePartition);
BOSECERT_ERROR(DimensionOverflow);
BOSECERT_ERROR(KernelSamplingError);
BOSECERT_ERROR(NoConvergence);
BOSECERT_ERROR(ConfigError);
BOSECERT_ERROR(IoError);

#undef BOSECERT_ERROR

} // namespace bosecert
