#include "nepv/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace nepv {

using linalg::lstsq;
using linalg::sym_eig;
using linalg::thin_qr;
using linalg::unvec;
using linalg::vec;

RealEigPairs real_eig_pairs(const Matrix& M) {
  Eigen::EigenSolver<Matrix> es(M);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("real_eig_pairs: eigensolver failed");
  const Index n = M.rows();
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<std::pair<double, Index>> real_idx;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()(i).imag()) <= 1e-8 * std::max(scale, 1.0))
      real_idx.emplace_back(es.eigenvalues()(i).real(), i);
  }
  std::stable_sort(real_idx.begin(), real_idx.end());
  RealEigPairs out;
  out.values.resize(Index(real_idx.size()));
  out.vectors.resize(n, Index(real_idx.size()));
  for (Index k = 0; k < Index(real_idx.size()); ++k) {
    out.values(k) = real_idx[k].first;
    Vector x = es.eigenvectors().col(real_idx[k].second).real();
    out.vectors.col(k) = x / x.norm();
  }
  return out;
}

Selection select_eigenpairs(const Vector& values, const Matrix& vectors, Index p,
                            const SelectionStrategy& strategy, const Matrix& previous) {
  const Index m = values.size();
  switch (strategy.kind) {
    case SelectionKind::smallest_p: {
      if (m < p) throw SelectionError("selection: fewer eigenpairs than p");
      return {vectors.leftCols(p), values.head(p)};
    }
    case SelectionKind::nearest_target: {
      if (m < p) throw SelectionError("selection: fewer eigenpairs than p");
      std::vector<Index> idx(m);
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        return std::abs(values(a) - strategy.target) <
               std::abs(values(b) - strategy.target);
      });
      idx.resize(p);
      std::sort(idx.begin(), idx.end()); // keep ascending eigenvalue order
      Selection sel;
      sel.Y.resize(vectors.rows(), p);
      sel.values.resize(p);
      for (Index k = 0; k < p; ++k) {
        sel.Y.col(k) = vectors.col(idx[k]);
        sel.values(k) = values(idx[k]);
      }
      return sel;
    }
    case SelectionKind::cluster_lstsq: {
      if (p != 1)
        throw SelectionError("cluster_lstsq selection is a p = 1 strategy");
      if (m == 0) throw SelectionError("cluster_lstsq: no eigenpairs");
      // Gather the cluster around the target. If the fit captures too little
      // of the previous iterate (empty cluster, or only spurious eigenpairs
      // inside the radius), widen the radius geometrically: the tracked
      // branch is then picked up by its overlap rather than its eigenvalue.
      std::vector<Index> idx;
      Vector c, y;
      double nrm = 0.0;
      for (double radius = strategy.delta; radius <= 64.0 * strategy.delta;
           radius *= 2.0) {
        idx.clear();
        for (Index i = 0; i < m; ++i)
          if (std::abs(values(i) - strategy.target) <= radius) idx.push_back(i);
        if (idx.empty()) continue;
        Matrix U(vectors.rows(), Index(idx.size()));
        for (Index k = 0; k < Index(idx.size()); ++k) U.col(k) = vectors.col(idx[k]);
        c = lstsq(U, previous.col(0));
        y = U * c;
        nrm = y.norm();
        if (nrm >= 0.5) break;
      }
      if (nrm < 1e-14)
        throw SelectionError("cluster_lstsq: previous iterate orthogonal to cluster");
      double lam = 0.0;
      for (Index k = 0; k < Index(idx.size()); ++k)
        lam += c(k) * c(k) * values(idx[k]);
      lam /= c.squaredNorm();
      Selection sel;
      sel.Y = y / nrm;
      sel.values = Vector::Constant(1, lam);
      return sel;
    }
  }
  throw SelectionError("selection: unknown strategy");
}

namespace {

SelectionStrategy resolve_target(SelectionStrategy s, double rayleigh) {
  if (!s.has_target &&
      (s.kind == SelectionKind::nearest_target || s.kind == SelectionKind::cluster_lstsq)) {
    s.target = rayleigh;
    s.has_target = true;
  }
  return s;
}

Matrix similarity_from_qr(const Vector& z, const Matrix& R) {
  Matrix ZR = z.asDiagonal() * R;
  Matrix S = R.triangularView<Eigen::Upper>().solve(ZR);
  return 0.5 * (S + S.transpose()); // R^{-1} Z R loses symmetry in floating point
}

} // namespace

StepResult step_a_version(const NepvProblem& problem, const Matrix& V_k,
                          const SelectionStrategy& strategy) {
  const Index p = V_k.cols();
  Matrix A = problem.A(V_k);
  auto eig = sym_eig(A);
  double rayleigh = (V_k.transpose() * A * V_k).trace() / double(p);
  Selection sel =
      select_eigenpairs(eig.eigenvalues, eig.eigenvectors, p,
                        resolve_target(strategy, rayleigh), V_k);
  auto qr = thin_qr(sel.Y);
  Matrix S = similarity_from_qr(sel.values, qr.R);
  Matrix Q = qr.Q;
  if (p == 1 && Q.col(0).dot(V_k.col(0)) < 0) Q = -Q;
  return {{Q, S}, sel.values};
}

StepResult step_j_version_p1(const NepvProblem& problem, const Vector& v_k,
                             const SelectionStrategy& strategy) {
  Matrix J = problem.J(v_k);
  RealEigPairs pairs = real_eig_pairs(J);
  if (pairs.values.size() == 0)
    throw SelectionError("j_version: J has no real eigenpairs");
  double rayleigh = v_k.dot(J * v_k) / v_k.squaredNorm();
  Selection sel = select_eigenpairs(pairs.values, pairs.vectors, 1,
                                    resolve_target(strategy, rayleigh), v_k);
  Vector y = sel.Y.col(0);
  if (y.dot(v_k) < 0) y = -y;
  Matrix V(y.size(), 1);
  V.col(0) = y;
  Matrix S = Matrix::Constant(1, 1, sel.values(0));
  return {{V, S}, sel.values};
}

// ---------------------------------------------------------------------------
// Inexact p > 1 J-version: Nelder-Mead on the QR-retracted update equation.
// ---------------------------------------------------------------------------

namespace {

struct InnerObjective {
  const Matrix& Jk;
  Index n, p;
  mutable int evals = 0;

  double operator()(const Vector& x, Matrix* Q_out = nullptr,
                    Matrix* S_out = nullptr) const {
    ++evals;
    Matrix V = unvec(x, n, p);
    linalg::ThinQr qr;
    try {
      qr = thin_qr(V);
    } catch (const std::runtime_error&) {
      return std::numeric_limits<double>::max();
    }
    Matrix G = unvec(Jk * vec(qr.Q), n, p);
    // optimal symmetric S for this V
    Matrix S = 0.5 * (qr.Q.transpose() * G + G.transpose() * qr.Q);
    double r = (G - qr.Q * S).squaredNorm();
    if (Q_out) *Q_out = qr.Q;
    if (S_out) *S_out = S;
    return r;
  }
};

// fminsearch-style Nelder-Mead with restarts until the evaluation budget
// is exhausted.
Vector nelder_mead(const InnerObjective& f, const Vector& x0, int budget,
                   double* f_best_out) {
  const Index d = x0.size();
  Vector best = x0;
  double f_best = f(x0);
  double scale = 0.05;

  while (f.evals < budget && f_best > 1e-26) {
    std::vector<Vector> xs(d + 1, best);
    std::vector<double> fs(d + 1);
    fs[0] = f_best;
    for (Index i = 0; i < d; ++i) {
      double step = scale * std::max(std::abs(best(i)), 0.02);
      xs[i + 1](i) += step;
      fs[i + 1] = f(xs[i + 1]);
      if (f.evals >= budget) break;
    }
    bool progressed = false;
    while (f.evals < budget) {
      // order simplex
      std::vector<Index> ord(d + 1);
      std::iota(ord.begin(), ord.end(), 0);
      std::sort(ord.begin(), ord.end(), [&](Index a, Index b) { return fs[a] < fs[b]; });
      {
        std::vector<Vector> xs2(d + 1);
        std::vector<double> fs2(d + 1);
        for (Index i = 0; i <= d; ++i) {
          xs2[i] = xs[ord[i]];
          fs2[i] = fs[ord[i]];
        }
        xs.swap(xs2);
        fs.swap(fs2);
      }
      if (fs[0] < f_best) {
        f_best = fs[0];
        best = xs[0];
        progressed = true;
      }
      if (fs[d] - fs[0] <= 1e-14 * (std::abs(fs[0]) + 1e-30)) break;
      if (f_best <= 1e-26) break;

      Vector centroid = Vector::Zero(d);
      for (Index i = 0; i < d; ++i) centroid += xs[i];
      centroid /= double(d);

      Vector xr = centroid + (centroid - xs[d]);
      double fr = f(xr);
      if (fr < fs[0]) {
        Vector xe = centroid + 2.0 * (centroid - xs[d]);
        double fe = f(xe);
        if (fe < fr) {
          xs[d] = xe;
          fs[d] = fe;
        } else {
          xs[d] = xr;
          fs[d] = fr;
        }
      } else if (fr < fs[d - 1]) {
        xs[d] = xr;
        fs[d] = fr;
      } else {
        bool outside = fr < fs[d];
        Vector xc = outside ? Vector(centroid + 0.5 * (centroid - xs[d]))
                            : Vector(centroid - 0.5 * (centroid - xs[d]));
        double fc = f(xc);
        if (fc < std::min(fr, fs[d])) {
          xs[d] = xc;
          fs[d] = fc;
        } else {
          for (Index i = 1; i <= d; ++i) {
            xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
            fs[i] = f(xs[i]);
            if (f.evals >= budget) break;
          }
        }
      }
    }
    // restart with a tighter simplex around the incumbent
    scale = progressed ? scale * 0.5 : scale * 0.1;
    if (scale < 1e-10) scale = 1e-10;
  }
  *f_best_out = f_best;
  return best;
}

} // namespace

StepResult step_j_version_subspace(const NepvProblem& problem,
                                   const SubspaceIterate& iterate, int budget) {
  const Index n = iterate.V.rows(), p = iterate.V.cols();
  Matrix Jk = problem.J(vec(iterate.V));
  InnerObjective obj{Jk, n, p};
  double r0 = obj(vec(iterate.V));
  obj.evals = 0;

  double r_best = 0.0;
  Vector x_best = nelder_mead(obj, vec(iterate.V), budget, &r_best);
  if (r_best > r0)
    throw std::runtime_error("j_version inner solver failed to reduce the residual");

  Matrix Q, S;
  obj(x_best, &Q, &S);
  auto eig = sym_eig(S);
  return {{Q, S}, eig.eigenvalues};
}

// ---------------------------------------------------------------------------
// Newton's method on the vectorized system
// ---------------------------------------------------------------------------

namespace {

Matrix bordered_jacobian(const NepvProblem& problem, const SubspaceIterate& it) {
  const Index n = it.V.rows(), p = it.V.cols();
  const Index np = n * p, pp = p * p;
  Matrix M = Matrix::Zero(np + pp, np + pp);
  M.topLeftCorner(np, np) =
      problem.J(vec(it.V)) -
      linalg::kron(Matrix(it.S.transpose()), Matrix::Identity(n, n));
  M.topRightCorner(np, pp) = -linalg::kron(Matrix::Identity(p, p), it.V);
  M.bottomLeftCorner(pp, np) = orthogonality_derivative(it.V);
  return M;
}

} // namespace

void step_newton(const NepvProblem& problem, Vector& v, Matrix& S) {
  const Index n = problem.dim(), p = problem.subspace_dim();
  SubspaceIterate it{unvec(v, n, p), S};
  ResidualValue F = residual(problem, it);
  Matrix M = bordered_jacobian(problem, it);
  Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible()) {
    Eigen::BDCSVD<Matrix> svd(M);
    throw SingularMatrixError("newton: singular update matrix",
                              svd.singularValues()(M.rows() - 1));
  }
  Vector rhs(F.block1.size() + F.block2.size());
  rhs << -F.block1, -F.block2;
  Vector d = lu.solve(rhs);
  v += d.head(n * p);
  S += unvec(d.tail(p * p), p, p);
}

Vector step_j_inverse(const NepvProblem& problem, const Vector& v_k) {
  Matrix J = problem.J(v_k);
  Eigen::FullPivLU<Matrix> lu(J);
  if (!lu.isInvertible()) {
    Eigen::BDCSVD<Matrix> svd(J);
    throw SingularMatrixError("j_inverse: singular J", svd.singularValues()(J.rows() - 1));
  }
  Vector w = lu.solve(v_k);
  w /= w.norm();
  if (w.dot(v_k) < 0) w = -w;
  return w;
}

// ---------------------------------------------------------------------------
// Outer loop
// ---------------------------------------------------------------------------

IterationTrace solve(const NepvProblem& problem, const SolverConfig& config,
                     const Matrix& V0, const Matrix* reference) {
  const Index n = problem.dim(), p = problem.subspace_dim();
  if (V0.rows() != n || V0.cols() != p)
    throw std::invalid_argument("solve: V0 has wrong shape");
  if (orthogonality_defect(V0) > 1e-8)
    throw std::invalid_argument("solve: V0 must be orthonormal");
  if (config.tol <= 0 || config.max_iter < 1)
    throw std::invalid_argument("solve: bad tolerance or iteration cap");
  if ((config.method == Method::j_inverse) && p != 1)
    throw std::invalid_argument("solve: j_inverse requires p = 1");

  IterationTrace trace;
  trace.iterates.push_back(V0);

  Matrix V = V0;
  Matrix A0V = problem.A(V0);
  Matrix S = 0.5 * (V0.transpose() * A0V * V0 +
                    (V0.transpose() * A0V * V0).transpose());
  Vector v = vec(V0); // state for newton / j_inverse / p=1 paths

  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int k = 1; k <= config.max_iter; ++k) {
    auto t0 = std::chrono::steady_clock::now();
    Vector selected;
    try {
      switch (config.method) {
        case Method::a_version: {
          StepResult r = step_a_version(problem, V, config.selection);
          V = r.iterate.V;
          S = r.iterate.S;
          selected = r.selected_eigenvalues;
          break;
        }
        case Method::j_version: {
          if (p == 1) {
            StepResult r = step_j_version_p1(problem, v, config.selection);
            V = r.iterate.V;
            S = r.iterate.S;
            v = V.col(0);
            selected = r.selected_eigenvalues;
          } else {
            StepResult r = step_j_version_subspace(problem, {V, S}, config.inexact_budget);
            V = r.iterate.V;
            S = r.iterate.S;
            selected = r.selected_eigenvalues;
          }
          break;
        }
        case Method::newton: {
          step_newton(problem, v, S);
          V = unvec(v, n, p);
          selected = sym_eig(0.5 * (S + S.transpose())).eigenvalues;
          break;
        }
        case Method::j_inverse: {
          v = step_j_inverse(problem, v);
          V = unvec(v, n, p);
          Matrix A = problem.A(V);
          double lam = v.dot(A * v);
          S = Matrix::Constant(1, 1, lam);
          selected = Vector::Constant(1, lam);
          break;
        }
      }
    } catch (const SelectionError&) {
      trace.status = SolveStatus::selection_failed;
      trace.final = {V, S};
      return trace;
    }

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double res = residual(problem, {V, S}).norm;
    double err = reference ? subspace_error(V, *reference) : nan;
    trace.steps.push_back({k, err, res, orthogonality_defect(V), selected, wall});
    trace.iterates.push_back(V);

    if (res <= config.tol) {
      trace.status = SolveStatus::converged;
      trace.final = {V, S};
      return trace;
    }
    const auto& steps = trace.steps;
    if (steps.size() >= 11) {
      double prev = steps[steps.size() - 11].residual_norm;
      if (res > (1.0 - 1e-2) * prev) {
        trace.status = SolveStatus::stagnated;
        trace.final = {V, S};
        return trace;
      }
    }
  }
  trace.status = SolveStatus::max_iter;
  trace.final = {V, S};
  return trace;
}

} // namespace nepv
