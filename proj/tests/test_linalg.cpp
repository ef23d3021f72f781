#include <doctest.h>

#include "nepv/linalg.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace nepv;
using namespace nepv::linalg;

TEST_CASE("vec and unvec use column-major stacking") {
  Matrix M(2, 2);
  M << 1, 3, 2, 4;
  Vector x = vec(M);
  CHECK(x(0) == 1);
  CHECK(x(1) == 2);
  CHECK(x(2) == 3);
  CHECK(x(3) == 4);
  CHECK(unvec(x, 2, 2) == M);

  Matrix one(1, 1);
  one << 7;
  CHECK(vec(one)(0) == 7);
  CHECK_THROWS_AS(unvec(x, 3, 2), std::invalid_argument);
}

TEST_CASE("kron basics and the vec identity") {
  Xorshift64Star rng(11);
  Matrix M = test::random_matrix(2, 2, rng);

  Matrix K = kron(Matrix::Identity(2, 2), M);
  CHECK((K.topLeftCorner(2, 2) - M).norm() == 0);
  CHECK((K.bottomRightCorner(2, 2) - M).norm() == 0);
  CHECK(K.topRightCorner(2, 2).norm() == 0);

  Matrix scalar(1, 1);
  scalar << 2;
  CHECK((kron(scalar, M) - 2 * M).norm() == 0);

  for (int trial = 0; trial < 20; ++trial) {
    Matrix A = test::random_matrix(2, 2, rng);
    Matrix B = test::random_matrix(2, 2, rng);
    Matrix X = test::random_matrix(2, 2, rng);
    Vector lhs = kron(A, B) * vec(X);
    Vector rhs = vec(Matrix(B * X * A.transpose()));
    CHECK((lhs - rhs).norm() <= 1e-14);
  }
}

TEST_CASE("shuffle matrix transposes vectorizations") {
  CHECK(shuffle_matrix(1)(0, 0) == 1.0);

  Matrix P2 = shuffle_matrix(2);
  Matrix W2(2, 2);
  W2 << 1, 3, 2, 4; // vec = (1,2,3,4), vec(W^T) = (1,3,2,4)
  CHECK((P2 * vec(Matrix(W2.transpose())) - vec(W2)).norm() == 0);

  Xorshift64Star rng(3);
  for (Index n = 1; n <= 8; ++n) {
    Matrix P = shuffle_matrix(n);
    Matrix W = test::random_matrix(n, n, rng);
    CHECK((P * vec(Matrix(W.transpose())) - vec(W)).norm() == 0);
    CHECK((P * P - Matrix::Identity(n * n, n * n)).norm() == 0);
  }
}

TEST_CASE("sym_eig invariants") {
  auto id = sym_eig(Matrix::Identity(3, 3));
  CHECK(id.eigenvalues.isApprox(Vector::Ones(3)));

  Matrix D = Matrix::Zero(3, 3);
  D.diagonal() << 3, 1, 2;
  auto d = sym_eig(D);
  CHECK(d.eigenvalues(0) == doctest::Approx(1));
  CHECK(d.eigenvalues(1) == doctest::Approx(2));
  CHECK(d.eigenvalues(2) == doctest::Approx(3));

  Xorshift64Star rng(5);
  for (Index n : {8, 50, 200}) {
    Matrix M = test::random_symmetric(n, rng);
    auto e = sym_eig(M);
    Matrix rec = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
    CHECK((rec - M).norm() <= 1e-10 * M.norm());
    CHECK((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(n, n)).norm() <=
          1e-12 * double(n));
    for (Index i = 1; i < n; ++i) CHECK(e.eigenvalues(i) >= e.eigenvalues(i - 1));
  }

  Matrix bad(2, 2);
  bad << 0, 1, -1, 0;
  CHECK_THROWS_AS(sym_eig(bad), std::invalid_argument);
  Matrix nonfinite = Matrix::Constant(2, 2, std::nan(""));
  CHECK_THROWS_AS(sym_eig(nonfinite), std::invalid_argument);
}

TEST_CASE("thin_qr with positive-diagonal convention") {
  Xorshift64Star rng(7);
  Matrix V = test::random_orthonormal(5, 2, rng);
  auto qr = thin_qr(V);
  CHECK((qr.Q - V).norm() <= 1e-12);
  CHECK((qr.R - Matrix::Identity(2, 2)).norm() <= 1e-12);

  Matrix Y = Matrix::Zero(3, 1);
  Y(0, 0) = 2.0;
  auto qr1 = thin_qr(Y);
  CHECK(qr1.Q(0, 0) == doctest::Approx(1));
  CHECK(qr1.R(0, 0) == doctest::Approx(2));

  Matrix Y2 = test::random_matrix(6, 2, rng);
  auto qr2 = thin_qr(Y2);
  CHECK((qr2.Q * qr2.R - Y2).norm() <= 1e-12 * Y2.norm());
  CHECK((qr2.Q.transpose() * qr2.Q - Matrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK(qr2.R(1, 0) == 0.0);
  CHECK(qr2.R(0, 0) > 0);
  CHECK(qr2.R(1, 1) > 0);

  // deterministic: repeated factorizations are bitwise identical
  auto qr3 = thin_qr(Y2);
  CHECK((qr3.Q - qr2.Q).cwiseAbs().maxCoeff() == 0.0);
  CHECK((qr3.R - qr2.R).cwiseAbs().maxCoeff() == 0.0);

  Matrix rank1(4, 2);
  rank1.col(0).setOnes();
  rank1.col(1).setOnes();
  CHECK_THROWS_AS(thin_qr(rank1), std::runtime_error);
}

TEST_CASE("lstsq") {
  Vector b(3);
  b << 1, 2, 3;
  CHECK((lstsq(Matrix::Identity(3, 3), b) - b).norm() <= 1e-14);

  Matrix A = Matrix::Identity(3, 2);
  Vector x = lstsq(A, b);
  CHECK(x(0) == doctest::Approx(1));
  CHECK(x(1) == doctest::Approx(2));

  Xorshift64Star rng(13);
  Matrix A2 = test::random_matrix(6, 3, rng);
  Vector x0 = test::random_matrix(3, 1, rng).col(0);
  Vector sol = lstsq(A2, A2 * x0);
  CHECK((sol - x0).norm() <= 1e-10);
}

TEST_CASE("heaviside_psd is the range projector") {
  Matrix E11 = Matrix::Zero(2, 2);
  E11(0, 0) = 1.0;
  CHECK((heaviside_psd(E11) - E11).norm() <= 1e-12);

  Matrix V = Matrix::Identity(3, 2);
  Matrix P = heaviside_psd(V * V.transpose());
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = expected(1, 1) = 1.0;
  CHECK((P - expected).norm() <= 1e-12);

  Xorshift64Star rng(17);
  Matrix W = test::random_matrix(5, 2, rng);
  Matrix Q = thin_qr(W).Q;
  Matrix H = heaviside_psd(W * W.transpose());
  CHECK((H - Q * Q.transpose()).norm() <= 1e-10);
  CHECK((heaviside_psd(H) - H).norm() <= 1e-10); // idempotent

  Matrix neg = -Matrix::Identity(2, 2);
  CHECK_THROWS_AS(heaviside_psd(neg), std::invalid_argument);
}

TEST_CASE("fd_jacobian") {
  Xorshift64Star rng(19);
  Matrix M = test::random_matrix(4, 4, rng);
  Vector x = test::random_matrix(4, 1, rng).col(0);
  Matrix J = fd_jacobian([&](const Vector& v) { return Vector(M * v); }, x, 1e-5);
  CHECK((J - M).norm() <= 1e-10);

  Vector x2(2);
  x2 << 1, 2;
  auto square = [](const Vector& v) { return Vector(v.cwiseProduct(v)); };
  Matrix J2 = fd_jacobian(square, x2, 1e-5);
  CHECK(J2(0, 0) == doctest::Approx(2).epsilon(1e-8));
  CHECK(J2(1, 1) == doctest::Approx(4).epsilon(1e-8));
  CHECK(std::abs(J2(0, 1)) <= 1e-8);

  // cubic map: halving h shrinks the O(h^2) error about 4x
  auto cubic = [](const Vector& v) { return Vector(v.array().pow(3).matrix()); };
  Vector x3 = Vector::Constant(1, 1.3);
  Matrix exact = Matrix::Constant(1, 1, 3 * 1.3 * 1.3);
  double e1 = (fd_jacobian(cubic, x3, 1e-3) - exact).norm();
  double e2 = (fd_jacobian(cubic, x3, 5e-4) - exact).norm();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));

  CHECK_THROWS_AS(fd_jacobian(square, x2, -1.0), std::invalid_argument);
}
