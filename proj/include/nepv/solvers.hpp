#pragma once

#include "nepv/core.hpp"

#include <stdexcept>
#include <vector>

namespace nepv {

enum class Method { a_version, j_version, newton, j_inverse };

enum class SelectionKind { smallest_p, nearest_target, cluster_lstsq };

struct SelectionStrategy {
  SelectionKind kind = SelectionKind::smallest_p;
  double target = 0.0;
  bool has_target = false; // default target: Rayleigh quotient of previous iterate
  double delta = 0.1;      // cluster radius, in (0, 1)
};

struct SolverConfig {
  Method method = Method::a_version;
  double tol = 1e-10;
  int max_iter = 200;
  SelectionStrategy selection;
  int inexact_budget = 5000; // inner evaluation cap for the p > 1 J-version
};

enum class SolveStatus { converged, max_iter, stagnated, selection_failed };

struct StepRecord {
  int iter;
  double error; // vs. reference, NaN when no reference given
  double residual_norm;
  double orth_defect;
  Vector selected_eigenvalues;
  double wall_time_s;
};

struct IterationTrace {
  std::vector<StepRecord> steps;
  std::vector<Matrix> iterates; // V_0, V_1, ... (normalized view of each iterate)
  SubspaceIterate final;
  SolveStatus status = SolveStatus::max_iter;
};

class SelectionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public std::runtime_error {
public:
  SingularMatrixError(const std::string& what, double smallest_sv)
      : std::runtime_error(what), smallest_singular_value(smallest_sv) {}
  double smallest_singular_value;
};

/// Real eigenpairs of a (generally nonsymmetric) matrix, ascending by
/// eigenvalue, eigenvectors normalized. Complex pairs are dropped.
struct RealEigPairs {
  Vector values;
  Matrix vectors;
};
RealEigPairs real_eig_pairs(const Matrix& M);

/// Pick p eigenpairs from (values, vectors) according to the strategy.
/// previous is the previous iterate (used by cluster_lstsq). Ties broken
/// by ascending eigenvalue index.
struct Selection {
  Matrix Y;      // n x p
  Vector values; // selected eigenvalues (cluster_lstsq: fitted combination)
};
Selection select_eigenpairs(const Vector& values, const Matrix& vectors, Index p,
                            const SelectionStrategy& strategy, const Matrix& previous);

struct StepResult {
  SubspaceIterate iterate;
  Vector selected_eigenvalues;
};

/// One SCF step: eigendecompose A(V_k), select, re-orthonormalize by thin QR.
StepResult step_a_version(const NepvProblem& problem, const Matrix& V_k,
                          const SelectionStrategy& strategy);

/// One J-version step for p = 1: eigendecompose the nonsymmetric J(v_k),
/// select among real pairs, fix sign by overlap with v_k.
StepResult step_j_version_p1(const NepvProblem& problem, const Vector& v_k,
                             const SelectionStrategy& strategy);

/// One inexact J-version step for p > 1: derivative-free simplex minimization
/// of || J(v_k) vec(V) - vec(V S) ||^2 over QR-retracted V (S eliminated in
/// closed form), capped at `budget` evaluations.
StepResult step_j_version_subspace(const NepvProblem& problem,
                                   const SubspaceIterate& iterate, int budget);

/// One exact Newton step on the vectorized system; updates (v, S) additively.
void step_newton(const NepvProblem& problem, Vector& v, Matrix& S);

/// J-inverse iteration baseline: solve J(v_k) w = v_k and normalize.
Vector step_j_inverse(const NepvProblem& problem, const Vector& v_k);

/// Outer iteration for any method. `reference` (n x p, orthonormal), when
/// given, fills the per-step error column.
IterationTrace solve(const NepvProblem& problem, const SolverConfig& config,
                     const Matrix& V0, const Matrix* reference = nullptr);

} // namespace nepv
