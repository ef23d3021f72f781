#pragma once

#include "nepv/linalg.hpp"

namespace nepv {

/// A problem A(V)V = VS with V^T V = I. A(V) is symmetric; for
/// basis-invariant problems A depends only on range(V).
class NepvProblem {
public:
  virtual ~NepvProblem() = default;

  virtual Index dim() const = 0;          // ambient dimension n
  virtual Index subspace_dim() const = 0; // p
  virtual double alpha() const = 0;       // nonlinearity strength
  virtual bool has_analytic_jacobian() const { return true; }
  virtual bool is_basis_invariant() const = 0;

  /// A evaluated at V (n x p). Basis-variant problems require an
  /// orthonormal V.
  Matrix A(const Matrix& V) const;

  /// Jacobian of v -> (I_p (x) A(V)) v, an np x np matrix.
  Matrix J(const Vector& v) const;

protected:
  virtual Matrix eval_A(const Matrix& V) const = 0;
  virtual Matrix eval_J(const Vector& v) const = 0;
};

struct SubspaceIterate {
  Matrix V; // n x p, orthonormal
  Matrix S; // p x p, symmetric
};

struct ResidualValue {
  Vector block1; // vec(A(V)V - VS), length np
  Vector block2; // vec(V^T V - I), length p^2
  double norm;
};

struct FixedPointJacobian {
  Matrix matrix; // (np + p^2) square
  double smallest_singular_value;
};

ResidualValue residual(const NepvProblem& problem, const SubspaceIterate& iterate);

/// Derivative of v -> vec(V^T V); satisfies Z vec(W) = vec(W^T V + V^T W).
Matrix orthogonality_derivative(const Matrix& V);

/// Bordered Jacobian [[J(v) - S^T (x) I, -I_p (x) V], [Z, 0]] of the
/// vectorized system at the given iterate.
FixedPointJacobian fixed_point_jacobian(const NepvProblem& problem,
                                        const SubspaceIterate& iterate);

/// Basis-independent distance: for p = 1 the sign-aligned vector distance,
/// for p > 1 the Frobenius distance of the range projectors.
double subspace_error(const Matrix& V, const Matrix& V_ref);

double orthogonality_defect(const Matrix& V);

} // namespace nepv
