#include "nepv/driver.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace nepv {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using linalg::thin_qr;

namespace {

int log_level() {
  static int level = [] {
    const char* env = std::getenv("NEPV_LOG");
    if (!env) return 0;
    std::string s(env);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[nepv] " << msg << "\n";
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) { // compact form for directory names
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::stagnated: return "stagnated";
    case SolveStatus::selection_failed: return "selection_failed";
  }
  return "?";
}

std::string family_name(ProblemFamily f) {
  switch (f) {
    case ProblemFamily::scalar_sine: return "scalar_sine";
    case ProblemFamily::gpe: return "gpe";
    case ProblemFamily::heaviside: return "heaviside";
  }
  return "?";
}

double config_alpha(const ExperimentConfig& cfg) {
  return cfg.family == ProblemFamily::gpe ? cfg.b : cfg.alpha;
}

void write_trace_csv(const std::string& path, const IterationTrace& trace,
                     const std::vector<double>& errors, Index p) {
  std::ofstream out(path);
  out << "iter,error,residual,orth_defect";
  for (Index j = 1; j <= p; ++j) out << ",eig_" << j;
  out << "\n";
  for (size_t k = 0; k < trace.steps.size(); ++k) {
    const StepRecord& s = trace.steps[k];
    out << s.iter << "," << fmt17(errors[k]) << "," << fmt17(s.residual_norm) << ","
        << fmt17(s.orth_defect);
    for (Index j = 0; j < p; ++j)
      out << "," << fmt17(j < s.selected_eigenvalues.size() ? s.selected_eigenvalues(j)
                                                            : std::nan(""));
    out << "\n";
  }
}

struct RunResult {
  IterationTrace trace;
  std::vector<double> errors;
  double est_order = std::nan("");
};

RunResult run_and_trace(const NepvProblem& problem, const SolverConfig& solver,
                        const Matrix& V0) {
  RunResult r;
  r.trace = solve(problem, solver, V0);
  Matrix ref = polish_reference(problem, r.trace.final);
  for (size_t k = 1; k < r.trace.iterates.size(); ++k)
    r.errors.push_back(subspace_error(r.trace.iterates[k], ref));
  try {
    r.est_order = estimate_order(r.errors).order;
  } catch (const std::runtime_error&) {
    // too few points; leave as NaN
  }
  return r;
}

json summary_json(const ExperimentConfig& cfg, Method method, const RunResult& r) {
  json j;
  j["method"] = method_name(method);
  j["problem"] = family_name(cfg.family);
  j["alpha"] = config_alpha(cfg);
  j["status"] = status_name(r.trace.status);
  j["iterations"] = r.trace.steps.size();
  j["final_residual"] =
      r.trace.steps.empty() ? std::nan("") : r.trace.steps.back().residual_norm;
  if (std::isfinite(r.est_order))
    j["est_order"] = r.est_order;
  else
    j["est_order"] = nullptr;
  return j;
}

} // namespace

std::unique_ptr<NepvProblem> make_problem_alpha(const ExperimentConfig& cfg, double alpha) {
  switch (cfg.family) {
    case ProblemFamily::scalar_sine:
      return std::make_unique<ScalarSineProblem>(alpha);
    case ProblemFamily::heaviside:
      return std::make_unique<HeavisideTraceProblem>(cfg.n, cfg.p, alpha);
    case ProblemFamily::gpe: {
      GpeParams params;
      params.grid_n = cfg.grid_n;
      params.half_width = cfg.half_width;
      params.omega = cfg.omega;
      params.b = alpha;
      if (!cfg.potential_file.empty())
        params.potential =
            load_gpe_potential(cfg.potential_file, cfg.grid_n, cfg.half_width);
      return std::make_unique<GpeProblem>(params);
    }
  }
  throw ConfigError("unknown problem family");
}

std::unique_ptr<NepvProblem> make_problem(const ExperimentConfig& cfg) {
  return make_problem_alpha(cfg, config_alpha(cfg));
}

Matrix initial_guess(const ExperimentConfig& cfg, const NepvProblem& problem) {
  const Index n = problem.dim(), p = problem.subspace_dim();
  switch (cfg.initial) {
    case InitialKind::ones: {
      Matrix Y(n, p);
      Y.col(0).setOnes();
      for (Index j = 1; j < p; ++j) {
        Y.col(j).setZero();
        Y(j - 1, j) = 1.0;
      }
      return thin_qr(Y).Q;
    }
    case InitialKind::random: {
      Xorshift64Star rng(cfg.seed);
      Matrix Y(n, p);
      for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < n; ++i) Y(i, j) = rng.symmetric();
      return thin_qr(Y).Q;
    }
    case InitialKind::gaussian: {
      auto* gpe = dynamic_cast<const GpeProblem*>(&problem);
      if (!gpe) throw ConfigError("'initial=gaussian' requires the gpe family");
      const Index N = gpe->params().grid_n;
      const double L = gpe->params().half_width, dx = gpe->dx();
      Matrix Y = Matrix::Zero(n, 1);
      for (Index iy = 0; iy < N; ++iy)
        for (Index ix = 0; ix < N; ++ix) {
          double x = -L + double(ix + 1) * dx;
          double y = -L + double(iy + 1) * dx;
          Y(ix + iy * N, 0) = std::exp(-0.5 * (x * x + y * y));
        }
      Y /= Y.norm();
      return Y;
    }
  }
  throw ConfigError("unknown initial kind");
}

int cmd_run(const ExperimentConfig& cfg, const std::string& outdir) {
  try {
    auto problem = make_problem(cfg);
    Matrix V0 = initial_guess(cfg, *problem);
    log_info("run " + family_name(cfg.family) + " method=" + method_name(cfg.solver.method));
    RunResult r = run_and_trace(*problem, cfg.solver, V0);
    fs::create_directories(outdir);
    write_trace_csv(outdir + "/trace.csv", r.trace, r.errors, problem->subspace_dim());
    std::ofstream(outdir + "/summary.json")
        << summary_json(cfg, cfg.solver.method, r).dump(2) << "\n";
    log_info("status=" + status_name(r.trace.status));
    return r.trace.status == SolveStatus::converged ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_sweep_alpha(const ExperimentConfig& cfg, const std::string& outdir, int jobs) {
  try {
    if (cfg.alphas.empty()) throw ConfigError("'study.alphas' must not be empty");
    struct Cell {
      double alpha;
      Method method;
      std::string row;
    };
    std::vector<Cell> cells;
    for (double a : cfg.alphas)
      for (Method m : cfg.methods) cells.push_back({a, m, ""});

    fs::create_directories(outdir);
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        Cell& cell = cells[i];
        std::string cell_dir =
            outdir + "/alpha_" + fmt_short(cell.alpha) + "/" + method_name(cell.method);
        fs::create_directories(cell_dir);
        std::string row = fmt17(cell.alpha) + "," + method_name(cell.method);
        try {
          auto problem = make_problem_alpha(cfg, cell.alpha);
          SolverConfig solver = cfg.solver;
          solver.method = cell.method;
          Matrix V0 = initial_guess(cfg, *problem);
          RunResult r = run_and_trace(*problem, solver, V0);
          write_trace_csv(cell_dir + "/trace.csv", r.trace, r.errors,
                          problem->subspace_dim());
          ExperimentConfig cell_cfg = cfg;
          if (cfg.family == ProblemFamily::gpe) cell_cfg.b = cell.alpha;
          else cell_cfg.alpha = cell.alpha;
          std::ofstream(cell_dir + "/summary.json")
              << summary_json(cell_cfg, cell.method, r).dump(2) << "\n";
          long iters = r.trace.status == SolveStatus::converged
                           ? long(r.trace.steps.size())
                           : -1;
          double final_res =
              r.trace.steps.empty() ? std::nan("") : r.trace.steps.back().residual_norm;
          row += "," + std::to_string(iters) + "," + fmt17(final_res) + "," +
                 fmt17(r.est_order);
        } catch (const std::exception& e) {
          log_info(std::string("sweep cell failed: ") + e.what());
          row += ",-1,nan,nan";
        }
        cell.row = row;
      }
    };
    int nthreads = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ofstream out(outdir + "/sweep.csv");
    out << "alpha,method,iters_to_tol,final_residual,est_order\n";
    for (const Cell& cell : cells) out << cell.row << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}

namespace {

AlphaFamily alpha_family(const ExperimentConfig& cfg) {
  AlphaFamily family;
  family.make = [cfg](double a) { return make_problem_alpha(cfg, a); };
  switch (cfg.family) {
    case ProblemFamily::scalar_sine: {
      ScalarSineProblem model(0.0);
      family.A0 = model.A0();
      family.C = [model](const Vector& v) { return model.C(v); };
      break;
    }
    case ProblemFamily::gpe: {
      ExperimentConfig base = cfg;
      base.b = 0.0;
      auto linear = make_problem(base);
      auto* gpe = dynamic_cast<GpeProblem*>(linear.get());
      family.A0 = gpe->A0_real();
      double inv_dx2 = 1.0 / (gpe->dx() * gpe->dx());
      GpeParams params = gpe->params();
      family.C = [params, inv_dx2](const Vector& v) {
        GpeProblem model(params);
        return Matrix((inv_dx2 / v.squaredNorm()) * model.B(v));
      };
      break;
    }
    case ProblemFamily::heaviside:
      throw ConfigError("single_step requires a p = 1 problem family");
  }
  return family;
}

} // namespace

int cmd_single_step(const ExperimentConfig& cfg, const std::string& outdir) {
  try {
    if (cfg.alphas.empty()) throw ConfigError("'study.alphas' must not be empty");
    AlphaFamily family = alpha_family(cfg);
    auto probe = make_problem_alpha(cfg, cfg.alphas.front());
    Vector v0 = initial_guess(cfg, *probe).col(0);
    SingleStepReport report = single_step_study(family, v0, cfg.alphas);

    fs::create_directories(outdir);
    std::ofstream out(outdir + "/single_step.csv");
    out << "alpha,err_A,err_J,pred_A,pred_J\n";
    for (size_t i = 0; i < report.alphas.size(); ++i) {
      out << fmt17(report.alphas[i]) << "," << fmt17(report.err_A[i]) << ","
          << fmt17(report.err_J[i]) << "," << fmt17(report.coeff_A * report.alphas[i])
          << "," << fmt17(report.coeff_J * report.alphas[i]) << "\n";
    }
    json j;
    j["slope_A"] = report.slope_A;
    j["slope_J"] = report.slope_J;
    j["coeff_A"] = report.coeff_A;
    j["coeff_J"] = report.coeff_J;
    std::ofstream(outdir + "/single_step.json") << j.dump(2) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_order(const ExperimentConfig& cfg, const std::string& outdir) {
  try {
    auto problem = make_problem(cfg);
    Matrix V0 = initial_guess(cfg, *problem);
    json j;
    bool all_converged = true;
    for (Method m : cfg.methods) {
      SolverConfig solver = cfg.solver;
      solver.method = m;
      RunResult r = run_and_trace(*problem, solver, V0);
      json entry;
      entry["status"] = status_name(r.trace.status);
      entry["iterations"] = r.trace.steps.size();
      if (std::isfinite(r.est_order))
        entry["est_order"] = r.est_order;
      else
        entry["est_order"] = nullptr;
      j[method_name(m)] = entry;
      all_converged = all_converged && r.trace.status == SolveStatus::converged;
    }
    fs::create_directories(outdir);
    std::ofstream(outdir + "/order.json") << j.dump(2) << "\n";
    return all_converged ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}

} // namespace nepv
