#include "nepv/core.hpp"

#include <cmath>
#include <stdexcept>

namespace nepv {

using linalg::kron;
using linalg::shuffle_matrix;
using linalg::unvec;
using linalg::vec;

Matrix NepvProblem::A(const Matrix& V) const {
  if (V.rows() != dim() || V.cols() != subspace_dim())
    throw std::invalid_argument("NepvProblem::A: V has wrong shape");
  if (!is_basis_invariant() && orthogonality_defect(V) > 1e-8)
    throw std::invalid_argument("NepvProblem::A: V must be orthonormal");
  return eval_A(V);
}

Matrix NepvProblem::J(const Vector& v) const {
  if (v.size() != dim() * subspace_dim())
    throw std::invalid_argument("NepvProblem::J: v has wrong length");
  if (v.norm() == 0.0)
    throw std::invalid_argument("NepvProblem::J: v must be nonzero");
  if (!has_analytic_jacobian())
    throw std::runtime_error("NepvProblem::J: no analytic Jacobian");
  return eval_J(v);
}

ResidualValue residual(const NepvProblem& problem, const SubspaceIterate& iterate) {
  const Index p = iterate.V.cols();
  Matrix Av = problem.A(iterate.V);
  ResidualValue r;
  r.block1 = vec(Av * iterate.V - iterate.V * iterate.S);
  r.block2 = vec(iterate.V.transpose() * iterate.V - Matrix::Identity(p, p));
  r.norm = std::sqrt(r.block1.squaredNorm() + r.block2.squaredNorm());
  return r;
}

Matrix orthogonality_derivative(const Matrix& V) {
  const Index p = V.cols();
  Matrix IpVt = kron(Matrix::Identity(p, p), Matrix(V.transpose()));
  return (Matrix::Identity(p * p, p * p) + shuffle_matrix(p)) * IpVt;
}

FixedPointJacobian fixed_point_jacobian(const NepvProblem& problem,
                                        const SubspaceIterate& iterate) {
  const Index n = iterate.V.rows(), p = iterate.V.cols();
  const Index np = n * p, pp = p * p;
  Matrix M = Matrix::Zero(np + pp, np + pp);
  M.topLeftCorner(np, np) =
      problem.J(vec(iterate.V)) - kron(Matrix(iterate.S.transpose()), Matrix::Identity(n, n));
  M.topRightCorner(np, pp) = -kron(Matrix::Identity(p, p), iterate.V);
  M.bottomLeftCorner(pp, np) = orthogonality_derivative(iterate.V);
  Eigen::BDCSVD<Matrix> svd(M);
  return {M, svd.singularValues()(np + pp - 1)};
}

double subspace_error(const Matrix& V, const Matrix& V_ref) {
  if (V.rows() != V_ref.rows() || V.cols() != V_ref.cols())
    throw std::invalid_argument("subspace_error: shape mismatch");
  if (V.cols() == 1) {
    double plus = (V + V_ref).norm();
    double minus = (V - V_ref).norm();
    return std::min(plus, minus);
  }
  Matrix P = V * V.transpose();
  Matrix Pref = V_ref * V_ref.transpose();
  return (P - Pref).norm();
}

double orthogonality_defect(const Matrix& V) {
  const Index p = V.cols();
  return (V.transpose() * V - Matrix::Identity(p, p)).norm();
}

} // namespace nepv
