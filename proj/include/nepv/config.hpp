#pragma once

#include "nepv/solvers.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace nepv {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ProblemFamily { scalar_sine, gpe, heaviside };
enum class StudyKind { run, sweep_alpha, single_step, order };
enum class InitialKind { ones, random, gaussian };

struct ExperimentConfig {
  // [problem]
  ProblemFamily family = ProblemFamily::scalar_sine;
  double alpha = 0.5;
  Index n = 10, p = 3;            // heaviside
  Index grid_n = 20;              // gpe
  double half_width = 10.0;       // gpe
  double omega = 0.0;             // gpe
  double b = 0.0;                 // gpe
  std::string potential_file;

  // [solver]
  SolverConfig solver;
  std::uint64_t seed = 0;
  InitialKind initial = InitialKind::ones;

  // [study]
  StudyKind study = StudyKind::run;
  std::vector<double> alphas;
  std::vector<Method> methods; // sweep methods; defaults to solver.method

  // [output]
  std::string output_dir = ".";

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig parse(const std::string& text);
};

/// xorshift64* generator; used for reproducible random initial guesses.
class Xorshift64Star {
public:
  explicit Xorshift64Star(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dULL;
  }
  /// uniform on [-1, 1)
  double symmetric() { return 2.0 * (double(next() >> 11) * 0x1.0p-53) - 1.0; }

private:
  std::uint64_t state_;
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

} // namespace nepv
