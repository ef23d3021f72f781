#pragma once

#include <Eigen/Dense>
#include <functional>

namespace nepv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

/// Column-major stacking of the entries of M.
Vector vec(const Matrix& M);

/// Inverse of vec: reinterpret x as a rows-by-cols column-major matrix.
Matrix unvec(const Vector& x, Index rows, Index cols);

/// Kronecker product; satisfies vec(B X A^T) = (A (x) B) vec(X).
Matrix kron(const Matrix& A, const Matrix& B);

/// Permutation P of size n^2 with P vec(W^T) = vec(W) for every n-by-n W.
Matrix shuffle_matrix(Index n);

struct SymEigDecomposition {
  Vector eigenvalues;  // ascending
  Matrix eigenvectors; // orthogonal, columns match eigenvalues
};

/// Eigendecomposition of a symmetric matrix. The input is symmetrized
/// as (M + M^T)/2 before factorization; throws if the skew part is large
/// or entries are non-finite.
SymEigDecomposition sym_eig(const Matrix& M);

struct ThinQr {
  Matrix Q; // n x p, orthonormal columns
  Matrix R; // p x p, upper triangular, positive diagonal
};

/// Thin QR with the positive-diagonal sign convention.
/// Throws on rank deficiency (smallest singular value <= 1e-12 * ||Y||).
ThinQr thin_qr(const Matrix& Y);

/// Minimum-norm least-squares solution of min ||Ax - b||.
Vector lstsq(const Matrix& A, const Vector& b);

/// Spectral heaviside of a symmetric PSD matrix: eigenvalues above
/// eps_rank * ||M||_2 map to 1, the rest to 0. For M = W W^T with W of
/// full column rank this is the orthogonal projector onto range(W).
/// Throws if M has a significantly negative eigenvalue.
Matrix heaviside_psd(const Matrix& M, double eps_rank = 1e-8);

/// Central-difference Jacobian of f at x, column j = (f(x+h e_j) - f(x-h e_j)) / (2h).
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   double h);

} // namespace linalg
} // namespace nepv
