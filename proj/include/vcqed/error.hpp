#pragma once

#include <stdexcept>
#include <string>

namespace vcqed {

enum class ErrorKind {
  InvalidTruncation,
  DimensionMismatch,
  InvalidIndex,
  Config,
  NonConvergence,
  AmbiguousSteadyState,
  Timeout,
  Stiffness,
  UndefinedCorrelation,
  InsufficientWindow,
  Eigensolve,
  UnknownFigure,
  Physicality,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidTruncation: return "invalid_truncation";
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::InvalidIndex: return "invalid_index";
    case ErrorKind::Config: return "config";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::AmbiguousSteadyState: return "ambiguous_steady_state";
    case ErrorKind::Timeout: return "timeout";
    case ErrorKind::Stiffness: return "stiffness";
    case ErrorKind::UndefinedCorrelation: return "undefined_correlation";
    case ErrorKind::InsufficientWindow: return "insufficient_window";
    case ErrorKind::Eigensolve: return "eigensolve";
    case ErrorKind::UnknownFigure: return "unknown_figure";
    case ErrorKind::Physicality: return "physicality";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Solver failure that still carries the best residual reached.
class SolverError : public Error {
 public:
  SolverError(ErrorKind kind, const std::string& what, double best_residual)
      : Error(kind, what + " (best residual " + std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace vcqed
