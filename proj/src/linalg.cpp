#include "nepv/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace nepv::linalg {

Vector vec(const Matrix& M) {
  return Vector::Map(M.data(), M.size());
}

Matrix unvec(const Vector& x, Index rows, Index cols) {
  if (x.size() != rows * cols)
    throw std::invalid_argument("unvec: length does not match rows*cols");
  return Matrix::Map(x.data(), rows, cols);
}

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index j = 0; j < A.cols(); ++j)
    for (Index i = 0; i < A.rows(); ++i)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

Matrix shuffle_matrix(Index n) {
  if (n < 1) throw std::invalid_argument("shuffle_matrix: n must be >= 1");
  Matrix P = Matrix::Zero(n * n, n * n);
  // vec(W) entry (i + j*n) equals vec(W^T) entry (j + i*n)
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      P(i + j * n, j + i * n) = 1.0;
  return P;
}

SymEigDecomposition sym_eig(const Matrix& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("sym_eig: matrix must be square");
  if (!M.allFinite())
    throw std::invalid_argument("sym_eig: non-finite entries");
  const double nrm = M.norm();
  if ((M - M.transpose()).norm() > 1e-10 * std::max(nrm, 1.0))
    throw std::invalid_argument("sym_eig: matrix is not symmetric");
  Matrix Ms = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(Ms);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sym_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

ThinQr thin_qr(const Matrix& Y) {
  const Index n = Y.rows(), p = Y.cols();
  if (n < p) throw std::invalid_argument("thin_qr: need rows >= cols");
  Eigen::JacobiSVD<Matrix> svd(Y);
  const double smax = svd.singularValues()(0);
  if (svd.singularValues()(p - 1) <= 1e-12 * smax)
    throw std::runtime_error("thin_qr: rank-deficient input");
  Eigen::HouseholderQR<Matrix> qr(Y);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, p);
  Matrix R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j) {
    if (R(j, j) < 0) {
      R.row(j) = -R.row(j);
      Q.col(j) = -Q.col(j);
    }
  }
  return {Q, R};
}

Vector lstsq(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size())
    throw std::invalid_argument("lstsq: dimension mismatch");
  return A.completeOrthogonalDecomposition().solve(b);
}

Matrix heaviside_psd(const Matrix& M, double eps_rank) {
  SymEigDecomposition eig = sym_eig(M);
  const Index n = M.rows();
  const double scale = std::max(eig.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
  if (eig.eigenvalues(0) < -1e-10 * std::max(scale, 1.0))
    throw std::invalid_argument("heaviside_psd: matrix has a negative eigenvalue");
  Vector h(n);
  for (Index i = 0; i < n; ++i)
    h(i) = (eig.eigenvalues(i) > eps_rank * scale) ? 1.0 : 0.0;
  return eig.eigenvectors * h.asDiagonal() * eig.eigenvectors.transpose();
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   double h) {
  if (h <= 0) throw std::invalid_argument("fd_jacobian: h must be positive");
  const Index n = x.size();
  Vector xp = x, xm = x;
  Matrix J;
  for (Index j = 0; j < n; ++j) {
    xp(j) += h;
    xm(j) -= h;
    Vector fp = f(xp);
    Vector fm = f(xm);
    if (!fp.allFinite() || !fm.allFinite())
      throw std::runtime_error("fd_jacobian: map returned non-finite values");
    if (J.size() == 0) J.resize(fp.size(), n);
    J.col(j) = (fp - fm) / (2.0 * h);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return J;
}

} // namespace nepv::linalg
