#include <doctest.h>

#include "nepv/analysis.hpp"
#include "nepv/problems.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <memory>

using namespace nepv;

TEST_CASE("estimate_order on synthetic sequences") {
  // linear: e_{k+1} = 0.5 e_k
  std::vector<double> lin;
  double e = 1.0;
  for (int k = 0; k < 20; ++k) {
    lin.push_back(e);
    e *= 0.5;
  }
  OrderEstimate o1 = estimate_order(lin);
  CHECK(o1.order == doctest::Approx(1.0).epsilon(0.05));
  CHECK(o1.r_squared > 0.999);

  // quadratic: e_{k+1} = e_k^2
  std::vector<double> quad;
  e = 0.4;
  for (int k = 0; k < 10; ++k) {
    quad.push_back(e);
    e = e * e;
  }
  OrderEstimate o2 = estimate_order(quad);
  CHECK(o2.order == doctest::Approx(2.0).epsilon(0.05));

  // values at or below the floor are ignored
  std::vector<double> with_floor = lin;
  with_floor.push_back(1e-15);
  with_floor.push_back(1e-16);
  OrderEstimate o3 = estimate_order(with_floor);
  CHECK(o3.order == doctest::Approx(o1.order));
  CHECK(o3.last == o1.last);

  // scaling the sequence does not change the estimated order much
  std::vector<double> scaled;
  for (double v : quad) scaled.push_back(3.0 * v);
  CHECK(estimate_order(scaled).order == doctest::Approx(o2.order).epsilon(0.1));

  CHECK_THROWS(estimate_order({1.0, 0.5, 0.25}));
  CHECK_THROWS(estimate_order({1.0, 1e-13, 1e-14, 1e-15, 1e-15}));
}

namespace {

AlphaFamily scalar_sine_family() {
  ScalarSineProblem proto(0.0);
  AlphaFamily fam;
  fam.make = [](double a) -> std::unique_ptr<NepvProblem> {
    return std::make_unique<ScalarSineProblem>(a);
  };
  fam.A0 = proto.A0();
  fam.C = [proto](const Vector& v) { return proto.C(v); };
  return fam;
}

} // namespace

TEST_CASE("single-step errors scale linearly in alpha with the predicted constants") {
  AlphaFamily fam = scalar_sine_family();
  Vector v0 = Vector::Constant(4, 0.5);
  std::vector<double> alphas;
  for (int k = -7; k <= -3; ++k) alphas.push_back(std::pow(10.0, k));

  SingleStepReport rep = single_step_study(fam, v0, alphas);
  REQUIRE(rep.err_A.size() == alphas.size());
  CHECK(rep.slope_A == doctest::Approx(1.0).epsilon(0.05));
  CHECK(rep.slope_J == doctest::Approx(1.0).epsilon(0.05));
  CHECK(rep.coeff_A > 0.0);
  CHECK(rep.coeff_J > 0.0);

  // in the linear regime the method-to-method error ratio is a constant
  // independent of alpha, of the same size as the coefficient ratio (the
  // coefficients drop the resolvent weighting, so only the scale matches)
  double ratio0 = rep.err_A[0] / rep.err_J[0];
  for (size_t i = 1; i < alphas.size(); ++i)
    CHECK(rep.err_A[i] / rep.err_J[i] == doctest::Approx(ratio0).epsilon(0.01));
  double coeff_ratio = rep.coeff_A / rep.coeff_J;
  CHECK(ratio0 / coeff_ratio > 0.5);
  CHECK(ratio0 / coeff_ratio < 2.0);

  CHECK_THROWS(single_step_study(fam, v0, {}));
  CHECK_THROWS(single_step_study(fam, v0, {0.1, 0.01})); // not ascending
}

TEST_CASE("single-step coefficient of the J-version vanishes for a linear nonlinearity") {
  // C(v) constant in v: the J-version predictor P_J equals C itself, so
  // coeff_J = ||C v* - P_J v*|| = 0 while coeff_A stays positive in general.
  ScalarSineProblem proto(0.0);
  AlphaFamily fam;
  fam.A0 = proto.A0();
  Matrix Cfix = proto.A1();
  fam.C = [Cfix](const Vector&) { return Cfix; };
  fam.make = [](double) -> std::unique_ptr<NepvProblem> {
    return std::make_unique<ScalarSineProblem>(0.0);
  };

  Vector v0 = Vector::Constant(4, 0.5);
  Vector v0n = v0 / v0.norm();
  auto eig = linalg::sym_eig(fam.A0);
  Vector vstar = eig.eigenvectors.col(0);
  Matrix P_J = linalg::fd_jacobian(
      [&](const Vector& v) { return Vector(fam.C(v) * v); }, v0n, 1e-6);
  CHECK((fam.C(vstar) * vstar - P_J * vstar).norm() <= 1e-8);
  Matrix P_A = fam.C(v0n);
  CHECK((fam.C(vstar) * vstar - P_A * vstar).norm() <= 1e-8); // C constant: A too
}

TEST_CASE("jacobian diagnostics at a solved scalar-sine instance") {
  ScalarSineProblem problem(0.5);
  SolverConfig cfg;
  cfg.method = Method::newton;
  cfg.tol = 1e-12;
  IterationTrace t = solve(problem, cfg, Matrix::Constant(4, 1, 0.5));
  REQUIRE(t.status == SolveStatus::converged);

  JacobianDiagnosticsReport rep = jacobian_diagnostics(problem, t.final);
  CHECK(rep.smallest_singular_value > 1e-10);
  CHECK(!rep.near_singular);
  CHECK(rep.condition_number >= 1.0);
  CHECK(rep.condition_number ==
        doctest::Approx(rep.condition_number)); // finite

  Xorshift64Star rng(127);
  SubspaceIterate junk{test::random_orthonormal(4, 1, rng), Matrix::Zero(1, 1)};
  CHECK_THROWS_AS(jacobian_diagnostics(problem, junk), std::invalid_argument);
}

TEST_CASE("polish_reference sharpens a coarsely converged iterate") {
  ScalarSineProblem problem(0.5);
  SolverConfig cfg;
  cfg.method = Method::a_version;
  cfg.tol = 1e-6; // deliberately loose
  IterationTrace t = solve(problem, cfg, Matrix::Constant(4, 1, 0.5));
  REQUIRE(t.status == SolveStatus::converged);

  Matrix ref = polish_reference(problem, t.final);
  Matrix S = ref.transpose() * problem.A(ref) * ref;
  CHECK(residual(problem, {ref, S}).norm <= 1e-12);
  CHECK(subspace_error(ref, t.final.V) <= 1e-5);

  // p > 1 path
  HeavisideTraceProblem hp(10, 3, 0.5);
  SolverConfig hc;
  hc.method = Method::a_version;
  hc.tol = 1e-8;
  Xorshift64Star rng(131);
  IterationTrace th = solve(hp, hc, test::random_orthonormal(10, 3, rng));
  REQUIRE(th.status == SolveStatus::converged);
  Matrix href = polish_reference(hp, th.final);
  Matrix hs = href.transpose() * hp.A(href) * href;
  CHECK(residual(hp, {href, Matrix(0.5 * (hs + hs.transpose()))}).norm <= 1e-11);
}
