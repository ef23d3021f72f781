#include "nepv/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace nepv {

using linalg::fd_jacobian;
using linalg::sym_eig;
using linalg::unvec;
using linalg::vec;

namespace {

constexpr double kPrecisionFloor = 1e-12;

struct LineFit {
  double slope, intercept, r_squared;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double vxx = sxx - sx * sx / n;
  double vxy = sxy - sx * sy / n;
  double vyy = syy - sy * sy / n;
  double slope = vxy / vxx;
  double r2 = (vyy > 0) ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return {slope, (sy - slope * sx) / n, r2};
}

} // namespace

OrderEstimate estimate_order(const std::vector<double>& errors) {
  // usable prefix: everything before the precision floor is reached
  std::vector<double> e;
  for (double v : errors) {
    if (!std::isfinite(v) || v <= kPrecisionFloor) break;
    e.push_back(v);
  }
  if (e.size() < 4)
    throw std::runtime_error("estimate_order: too few error values above the precision floor");
  std::vector<double> x, y;
  for (size_t k = 0; k + 1 < e.size(); ++k) {
    x.push_back(std::log(e[k]));
    y.push_back(std::log(e[k + 1]));
  }
  LineFit fit = fit_line(x, y);
  return {fit.slope, 0, int(e.size()) - 1, fit.r_squared};
}

SingleStepReport single_step_study(const AlphaFamily& family, const Vector& v0,
                                   const std::vector<double>& alphas) {
  if (alphas.empty()) throw std::invalid_argument("single_step_study: empty alpha grid");
  for (size_t i = 1; i < alphas.size(); ++i)
    if (alphas[i] <= alphas[i - 1] || alphas[i - 1] <= 0)
      throw std::invalid_argument("single_step_study: alphas must be positive ascending");

  Vector v0n = v0 / v0.norm();
  Matrix V0 = v0n;

  // linear-limit solution: smallest eigenpair of A0, aligned with v0
  auto eig0 = sym_eig(family.A0);
  Vector vstar0 = eig0.eigenvectors.col(0);
  if (vstar0.dot(v0n) < 0) vstar0 = -vstar0;
  double lamstar0 = eig0.eigenvalues(0);

  SingleStepReport report;
  report.alphas = alphas;

  // references by Newton continuation along the alpha grid
  Vector vref = vstar0;
  Matrix Sref = Matrix::Constant(1, 1, lamstar0);
  SelectionStrategy smallest; // smallest_p

  for (double a : alphas) {
    auto problem = family.make(a);
    Vector v = vref;
    Matrix S = Sref;
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      step_newton(*problem, v, S);
      if (residual(*problem, {unvec(v, v.size(), 1), S}).norm <= 1e-13) {
        ok = true;
        break;
      }
    }
    if (!ok) throw std::runtime_error("single_step_study: reference solve failed");
    vref = v / v.norm();
    if (vref.dot(vstar0) < 0) vref = -vref;
    Sref = S;

    StepResult stepA = step_a_version(*problem, V0, smallest);
    StepResult stepJ = step_j_version_p1(*problem, v0n, smallest);
    report.err_A.push_back(subspace_error(stepA.iterate.V, vref));
    report.err_J.push_back(subspace_error(stepJ.iterate.V, vref));
  }

  std::vector<double> lx, lyA, lyJ;
  for (size_t i = 0; i < alphas.size(); ++i) {
    lx.push_back(std::log(alphas[i]));
    lyA.push_back(std::log(report.err_A[i]));
    lyJ.push_back(std::log(report.err_J[i]));
  }
  report.slope_A = fit_line(lx, lyA).slope;
  report.slope_J = fit_line(lx, lyJ).slope;

  Matrix P_A = family.C(v0n);
  Matrix P_J = fd_jacobian([&](const Vector& v) { return Vector(family.C(v) * v); },
                           v0n, 1e-6);
  Vector base = family.C(vstar0) * vstar0;
  report.coeff_A = (base - P_A * vstar0).norm();
  report.coeff_J = (base - P_J * vstar0).norm();
  return report;
}

JacobianDiagnosticsReport jacobian_diagnostics(const NepvProblem& problem,
                                               const SubspaceIterate& solution) {
  if (residual(problem, solution).norm > 1e-8)
    throw std::invalid_argument("jacobian_diagnostics: iterate is not a solution");
  FixedPointJacobian J = fixed_point_jacobian(problem, solution);
  Eigen::BDCSVD<Matrix> svd(J.matrix);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(J.matrix.rows() - 1);
  return {smin, smax / smin, smin < 1e-10};
}

Matrix polish_reference(const NepvProblem& problem, const SubspaceIterate& start) {
  const Index n = problem.dim(), p = problem.subspace_dim();
  if (p == 1) {
    Vector v = start.V.col(0);
    Matrix S = start.S;
    for (int it = 0; it < 60; ++it) {
      try {
        step_newton(problem, v, S);
      } catch (const SingularMatrixError&) {
        break;
      }
      if (residual(problem, {unvec(v, n, 1), S}).norm <= 1e-13) {
        Vector out = v / v.norm();
        return out;
      }
    }
    return start.V; // polish failed; the converged iterate is the best we have
  }
  SolverConfig cfg;
  cfg.method = Method::a_version;
  cfg.tol = 1e-13;
  cfg.max_iter = 2000;
  cfg.selection.kind = SelectionKind::nearest_target;
  cfg.selection.target = start.S.trace() / double(p);
  cfg.selection.has_target = true;
  IterationTrace t = solve(problem, cfg, start.V);
  return t.final.V;
}

} // namespace nepv
