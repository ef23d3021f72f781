#pragma once

#include "nepv/analysis.hpp"
#include "nepv/config.hpp"
#include "nepv/problems.hpp"

namespace nepv {

std::unique_ptr<NepvProblem> make_problem(const ExperimentConfig& cfg);
/// Same problem family with the nonlinearity strength overridden.
std::unique_ptr<NepvProblem> make_problem_alpha(const ExperimentConfig& cfg, double alpha);

/// Initial subspace per config (ones / seeded random / Gaussian bump).
Matrix initial_guess(const ExperimentConfig& cfg, const NepvProblem& problem);

/// Exit codes: 0 success, 1 non-convergence, 2 config error.
int cmd_run(const ExperimentConfig& cfg, const std::string& outdir);
int cmd_sweep_alpha(const ExperimentConfig& cfg, const std::string& outdir, int jobs);
int cmd_single_step(const ExperimentConfig& cfg, const std::string& outdir);
int cmd_order(const ExperimentConfig& cfg, const std::string& outdir);

} // namespace nepv
