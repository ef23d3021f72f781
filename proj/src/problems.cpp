#include "nepv/problems.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nepv {

using linalg::heaviside_psd;
using linalg::kron;
using linalg::shuffle_matrix;
using linalg::unvec;
using linalg::vec;

// ---------------------------------------------------------------------------
// Scalar sine problem
// ---------------------------------------------------------------------------

ScalarSineProblem::ScalarSineProblem(double alpha) : alpha_(alpha) {
  A0_.resize(4, 4);
  A1_.resize(4, 4);
  A2_.resize(4, 4);
  A0_ << 10, 21, 13, 16,
         21, -26, 24, 2,
         13, 24, -26, 37,
         16, 2, 37, -4;
  A1_ << 20, 28, 12, 32,
         28, 4, 14, 6,
         12, 14, 32, 34,
         32, 6, 34, 16;
  A2_ << -14, 16, -4, 15,
         16, 10, 15, -9,
         -4, 15, 16, 6,
         15, -9, 6, -6;
  A0_ /= 10.0;
  A1_ /= 10.0;
  A2_ /= 10.0;
}

Matrix ScalarSineProblem::C(const Vector& v) const {
  const double vv = v.squaredNorm();
  if (vv == 0.0) throw std::invalid_argument("ScalarSineProblem: zero vector");
  return std::sin(v.dot(A2_ * v) / vv) * A1_;
}

Matrix ScalarSineProblem::eval_A(const Matrix& V) const {
  return A0_ + alpha_ * C(V.col(0));
}

Matrix ScalarSineProblem::eval_J(const Vector& v) const {
  const double vv = v.squaredNorm();
  const double q = v.dot(A2_ * v) / vv;
  Vector a1v = A1_ * v;
  Eigen::RowVectorXd row = vv * (v.transpose() * A2_) - (q * vv) * v.transpose();
  return eval_A(v) + (2.0 * alpha_ * std::cos(q) / (vv * vv)) * (a1v * row);
}

// ---------------------------------------------------------------------------
// Gross-Pitaevskii problem
// ---------------------------------------------------------------------------

Matrix load_gpe_potential(const std::string& path, Index expect_n, double expect_l) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open potential file: " + path);
  std::string header;
  std::getline(in, header);
  Index n = 0;
  double l = 0;
  if (std::sscanf(header.c_str(), "# gpe-potential N=%ld L=%lf", &n, &l) != 2)
    throw std::runtime_error("bad potential header in " + path);
  if (n != expect_n || std::abs(l - expect_l) > 1e-12)
    throw std::runtime_error("potential grid does not match problem parameters");
  Matrix V(n, n);
  for (Index i = 0; i < n; ++i) { // rows of the file = rows of the grid
    std::string line;
    if (!std::getline(in, line))
      throw std::runtime_error("potential file truncated: " + path);
    std::stringstream ss(line);
    std::string cell;
    for (Index j = 0; j < n; ++j) {
      if (!std::getline(ss, cell, ','))
        throw std::runtime_error("potential row too short: " + path);
      V(i, j) = std::stod(cell);
    }
  }
  return V;
}

GpeProblem::GpeProblem(const GpeParams& params) : params_(params) {
  const Index N = params_.grid_n;
  if (N < 3) throw std::invalid_argument("GpeProblem: need at least 3 grid points");
  if (params_.half_width <= 0) throw std::invalid_argument("GpeProblem: L must be positive");
  const double L = params_.half_width;
  dx_ = 2.0 * L / double(N + 1);
  gamma_ = params_.b / (dx_ * dx_);

  const Index m = N * N;
  Matrix Re = Matrix::Zero(m, m); // -1/2 Laplacian + potential
  Matrix Im = Matrix::Zero(m, m); // -Omega (y d/dx - x d/dy)

  auto idx = [N](Index ix, Index iy) { return ix + iy * N; };
  const double inv2dx2 = 1.0 / (2.0 * dx_ * dx_);
  const double inv2dx = 1.0 / (2.0 * dx_);

  for (Index iy = 0; iy < N; ++iy) {
    for (Index ix = 0; ix < N; ++ix) {
      const Index g = idx(ix, iy);
      const double x = -L + double(ix + 1) * dx_;
      const double y = -L + double(iy + 1) * dx_;
      Re(g, g) = 4.0 * inv2dx2;
      if (params_.potential.size() != 0)
        Re(g, g) += params_.potential(ix, iy);
      else
        Re(g, g) += 0.5 * (x * x + y * y);
      if (ix > 0) Re(g, idx(ix - 1, iy)) -= inv2dx2;
      if (ix < N - 1) Re(g, idx(ix + 1, iy)) -= inv2dx2;
      if (iy > 0) Re(g, idx(ix, iy - 1)) -= inv2dx2;
      if (iy < N - 1) Re(g, idx(ix, iy + 1)) -= inv2dx2;
      // rotation term, central differences
      if (params_.omega != 0.0) {
        if (ix > 0) Im(g, idx(ix - 1, iy)) += params_.omega * y * inv2dx;
        if (ix < N - 1) Im(g, idx(ix + 1, iy)) -= params_.omega * y * inv2dx;
        if (iy > 0) Im(g, idx(ix, iy - 1)) -= params_.omega * x * inv2dx;
        if (iy < N - 1) Im(g, idx(ix, iy + 1)) += params_.omega * x * inv2dx;
      }
    }
  }

  A0_real_.resize(2 * m, 2 * m);
  A0_real_ << Re, -Im, Im, Re;
}

Matrix GpeProblem::B(const Vector& v) const {
  const Index m = dim() / 2;
  Vector d = v.head(m).cwiseAbs2() + v.tail(m).cwiseAbs2();
  Matrix B = Matrix::Zero(dim(), dim());
  B.diagonal().head(m) = d;
  B.diagonal().tail(m) = d;
  return B;
}

Matrix GpeProblem::eval_A(const Matrix& V) const {
  Vector v = V.col(0);
  const double vv = v.squaredNorm();
  if (vv == 0.0) throw std::invalid_argument("GpeProblem: zero vector");
  if (params_.b == 0.0) return A0_real_;
  return A0_real_ + (gamma_ / vv) * B(v);
}

Matrix GpeProblem::eval_J(const Vector& v) const {
  if (params_.b == 0.0) return A0_real_;
  const Index m = dim() / 2;
  const double vv = v.squaredNorm();
  Vector v1 = v.head(m), v2 = v.tail(m);

  Matrix M = Matrix::Zero(dim(), dim());
  M.diagonal().head(m) = 3.0 * v1.cwiseAbs2() + v2.cwiseAbs2();
  M.diagonal().tail(m) = v1.cwiseAbs2() + 3.0 * v2.cwiseAbs2();
  Vector cross = 2.0 * v1.cwiseProduct(v2);
  M.block(0, m, m, m).diagonal() = cross;
  M.block(m, 0, m, m).diagonal() = cross;

  Vector Bv = B(v) * v;
  return A0_real_ + (gamma_ / vv) * (M - (2.0 / vv) * (Bv * v.transpose()));
}

// ---------------------------------------------------------------------------
// Heaviside trace problem
// ---------------------------------------------------------------------------

HeavisideTraceProblem::HeavisideTraceProblem(Index n, Index p, double alpha)
    : n_(n), p_(p), alpha_(alpha) {
  if (p < 1 || p >= n)
    throw std::invalid_argument("HeavisideTraceProblem: need 1 <= p < n");
  A0_ = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    A0_(i, i) = 2.0;
    if (i > 0) A0_(i, i - 1) = -1.0;
    if (i < n - 1) A0_(i, i + 1) = -1.0;
  }
  A0inv_ = A0_.inverse();
  shuffle_ = shuffle_matrix(n);
}

Matrix heaviside_frechet(const Matrix& V, const Matrix& E) {
  Matrix P = V * V.transpose();
  Matrix I = Matrix::Identity(V.rows(), V.rows());
  return (I - P) * E * P + P * E * (I - P);
}

Matrix HeavisideTraceProblem::eval_A(const Matrix& V) const {
  Eigen::JacobiSVD<Matrix> svd(V);
  if (svd.singularValues()(p_ - 1) <= 1e-12 * svd.singularValues()(0))
    throw std::invalid_argument("HeavisideTraceProblem: rank-deficient V");
  Matrix P = heaviside_psd(V * V.transpose());
  Vector d = A0inv_ * P.diagonal();
  Matrix A = A0_;
  A.diagonal() += alpha_ * d;
  return A;
}

Matrix HeavisideTraceProblem::eval_J(const Vector& v) const {
  Matrix V = unvec(v, n_, p_);
  if (orthogonality_defect(V) > 1e-8)
    throw std::invalid_argument("HeavisideTraceProblem::J: V must be orthonormal");
  Matrix A = eval_A(V);
  Matrix J = kron(Matrix::Identity(p_, p_), A);

  // Correction term: sum_i vec(A_i V) L_g(V, e_i, e_i) (I + P_{n^2}) (V (x) I_n)
  // with A_i = alpha * Diag(A0^{-1} e_i). The row L_g(V, e_i, e_i) over the
  // canonical directions collapses to vec(a b^T + b a^T)^T with
  // a = (I - VV^T) e_i, b = VV^T e_i.
  Matrix P = V * V.transpose();
  Matrix U = Matrix::Zero(n_ * p_, n_ * n_);
  for (Index i = 0; i < n_; ++i) {
    Vector b = P.col(i);
    Vector a = -b;
    a(i) += 1.0;
    Matrix AiV = (alpha_ * A0inv_.col(i)).asDiagonal() * V;
    U += vec(AiV) * vec(a * b.transpose() + b * a.transpose()).transpose();
  }
  Matrix W = (Matrix::Identity(n_ * n_, n_ * n_) + shuffle_) *
             kron(V, Matrix::Identity(n_, n_));
  J += U * W;
  return J;
}

} // namespace nepv
