#pragma once

#include "nepv/solvers.hpp"

#include <functional>
#include <memory>

namespace nepv {

struct OrderEstimate {
  double order;     // slope of log e_{k+1} vs log e_k
  int first, last;  // window of usable error indices
  double r_squared;
};

/// Convergence-order estimate from an error sequence. Errors below the
/// 1e-12 precision floor are dropped; throws if fewer than 4 values remain.
OrderEstimate estimate_order(const std::vector<double>& errors);

/// Problem family A(v) = A0 + alpha C(v), parameterized by alpha.
struct AlphaFamily {
  std::function<std::unique_ptr<NepvProblem>(double)> make;
  Matrix A0;
  std::function<Matrix(const Vector&)> C; // nonlinearity at unit strength
};

struct SingleStepReport {
  std::vector<double> alphas;
  std::vector<double> err_A, err_J; // single-step error per alpha
  double slope_A, slope_J;          // log-log fit slopes
  double coeff_A, coeff_J;          // predicted coefficients
};

/// One step of each implicit method from v0 against a high-accuracy
/// reference v*(alpha), over an ascending alpha grid (p = 1 families).
SingleStepReport single_step_study(const AlphaFamily& family, const Vector& v0,
                                   const std::vector<double>& alphas);

struct JacobianDiagnosticsReport {
  double smallest_singular_value;
  double condition_number;
  bool near_singular; // smallest singular value below 1e-10
};

JacobianDiagnosticsReport jacobian_diagnostics(const NepvProblem& problem,
                                               const SubspaceIterate& solution);

/// Reference solution by polishing a converged iterate: Newton for p = 1,
/// continued SCF for p > 1, to tolerance 1e-13.
Matrix polish_reference(const NepvProblem& problem, const SubspaceIterate& start);

} // namespace nepv
