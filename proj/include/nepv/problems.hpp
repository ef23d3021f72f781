#pragma once

#include "nepv/core.hpp"

#include <memory>
#include <string>

namespace nepv {

/// 4x4 model problem A(v) = A0 + alpha * sin(v^T A2 v / v^T v) * A1
/// with a closed-form Jacobian.
class ScalarSineProblem : public NepvProblem {
public:
  explicit ScalarSineProblem(double alpha);

  Index dim() const override { return 4; }
  Index subspace_dim() const override { return 1; }
  double alpha() const override { return alpha_; }
  bool is_basis_invariant() const override { return true; }

  const Matrix& A0() const { return A0_; }
  const Matrix& A1() const { return A1_; }
  const Matrix& A2() const { return A2_; }

  /// Nonlinearity at unit strength: C(v) = sin(v^T A2 v / v^T v) A1.
  Matrix C(const Vector& v) const;

protected:
  Matrix eval_A(const Matrix& V) const override;
  Matrix eval_J(const Vector& v) const override;

private:
  double alpha_;
  Matrix A0_, A1_, A2_;
};

struct GpeParams {
  Index grid_n = 40;      // interior points per dimension
  double half_width = 10; // domain (-L, L)^2
  double omega = 0.5;     // rotation speed
  double b = 0;           // interaction strength
  /// Potential sampled on the interior grid (grid_n x grid_n). Empty means
  /// the harmonic trap (x^2 + y^2) / 2.
  Matrix potential;
};

/// Load a grid-sampled potential from a CSV file with header
/// "# gpe-potential N=<n> L=<l>", values row-major.
Matrix load_gpe_potential(const std::string& path, Index expect_n, double expect_l);

/// Realified finite-difference discretization of the 2-D rotating
/// Gross-Pitaevskii operator with zero Dirichlet boundary. The realified
/// linear part has the block structure [[Re A~0, -Im A~0], [Im A~0, Re A~0]]
/// and n = 2 N^2.
class GpeProblem : public NepvProblem {
public:
  explicit GpeProblem(const GpeParams& params);

  Index dim() const override { return 2 * params_.grid_n * params_.grid_n; }
  Index subspace_dim() const override { return 1; }
  double alpha() const override { return params_.b; }
  bool is_basis_invariant() const override { return true; }

  const Matrix& A0_real() const { return A0_real_; }
  double gamma() const { return gamma_; } // b / dx^2
  double dx() const { return dx_; }
  const GpeParams& params() const { return params_; }

  /// Interaction matrix B(v) = blockdiag(D, D), D = diag(v1)^2 + diag(v2)^2.
  Matrix B(const Vector& v) const;

protected:
  Matrix eval_A(const Matrix& V) const override;
  Matrix eval_J(const Vector& v) const override;

private:
  GpeParams params_;
  double dx_, gamma_;
  Matrix A0_real_;
};

/// A(V) = A0 + alpha * Diag(A0^{-1} diagvec(h(V V^T))) with A0 the
/// unscaled 1-D Laplacian tridiag(-1, 2, -1). Fully basis invariant;
/// the Jacobian is assembled from the Frechet derivative of the shifted
/// heaviside at the range projector.
class HeavisideTraceProblem : public NepvProblem {
public:
  HeavisideTraceProblem(Index n, Index p, double alpha);

  Index dim() const override { return n_; }
  Index subspace_dim() const override { return p_; }
  double alpha() const override { return alpha_; }
  bool is_basis_invariant() const override { return true; }

  const Matrix& A0() const { return A0_; }
  /// Column i of A0^{-1}; diag of it is the i-th nonlinearity direction.
  const Matrix& A0_inv_columns() const { return A0inv_; }

protected:
  Matrix eval_A(const Matrix& V) const override;
  Matrix eval_J(const Vector& v) const override;

private:
  Index n_, p_;
  double alpha_;
  Matrix A0_, A0inv_, shuffle_;
};

/// Frechet derivative of the shifted heaviside at the projector V V^T:
/// L_g(V V^T, E) = (I - VV^T) E VV^T + VV^T E (I - VV^T).
Matrix heaviside_frechet(const Matrix& V, const Matrix& E);

} // namespace nepv
