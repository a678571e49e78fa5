#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edgeview {

enum class ErrorKind {
  InvalidInput,
  SymmetryViolation,
  RankDeficiency,
  PencilDegeneracy,
  Configuration,
  Calibration,
  Dimension,
  DegenerateComponent,
  UnderdeterminedSystem,
  Conditioning,
  DegenerateMixture,
  UnresolvedAmbiguity,
  PilotDesign,
  Detection,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Conditioning failures carry the off-diagonal mass left by the joint diagonalizer.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double residual)
      : Error(ErrorKind::Conditioning, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace edgeview
