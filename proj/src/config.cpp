#include "nepv/config.hpp"

#include <fstream>
#include <sstream>

namespace nepv {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double d = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': " + value);
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for '" + key + "': " + value);
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(parse_double(key, cell));
  }
  return out;
}

} // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::a_version: return "a_version";
    case Method::j_version: return "j_version";
    case Method::newton: return "newton";
    case Method::j_inverse: return "j_inverse";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "a_version") return Method::a_version;
  if (name == "j_version") return Method::j_version;
  if (name == "newton") return Method::newton;
  if (name == "j_inverse") return Method::j_inverse;
  throw ConfigError("invalid value for 'method': " + name);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::string section;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("bad config line: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (section == "problem") {
      if (key == "family") {
        if (value == "scalar_sine") cfg.family = ProblemFamily::scalar_sine;
        else if (value == "gpe") cfg.family = ProblemFamily::gpe;
        else if (value == "heaviside") cfg.family = ProblemFamily::heaviside;
        else throw ConfigError("invalid value for 'family': " + value);
      } else if (key == "alpha") cfg.alpha = parse_double(key, value);
      else if (key == "n") cfg.n = parse_long(key, value);
      else if (key == "p") cfg.p = parse_long(key, value);
      else if (key == "N") cfg.grid_n = parse_long(key, value);
      else if (key == "L") cfg.half_width = parse_double(key, value);
      else if (key == "omega") cfg.omega = parse_double(key, value);
      else if (key == "b") cfg.b = parse_double(key, value);
      else if (key == "potential_file") cfg.potential_file = value;
      else throw ConfigError("unknown key 'problem." + key + "'");
    } else if (section == "solver") {
      if (key == "method") cfg.solver.method = method_from_name(value);
      else if (key == "tol") cfg.solver.tol = parse_double(key, value);
      else if (key == "max_iter") cfg.solver.max_iter = int(parse_long(key, value));
      else if (key == "selection") {
        if (value == "smallest_p") cfg.solver.selection.kind = SelectionKind::smallest_p;
        else if (value == "nearest_target") cfg.solver.selection.kind = SelectionKind::nearest_target;
        else if (value == "cluster_lstsq") cfg.solver.selection.kind = SelectionKind::cluster_lstsq;
        else throw ConfigError("invalid value for 'selection': " + value);
      } else if (key == "target") {
        cfg.solver.selection.target = parse_double(key, value);
        cfg.solver.selection.has_target = true;
      } else if (key == "delta") cfg.solver.selection.delta = parse_double(key, value);
      else if (key == "inexact_budget") cfg.solver.inexact_budget = int(parse_long(key, value));
      else if (key == "seed") cfg.seed = std::uint64_t(parse_long(key, value));
      else if (key == "initial") {
        if (value == "ones") cfg.initial = InitialKind::ones;
        else if (value == "random") cfg.initial = InitialKind::random;
        else if (value == "gaussian") cfg.initial = InitialKind::gaussian;
        else throw ConfigError("invalid value for 'initial': " + value);
      } else throw ConfigError("unknown key 'solver." + key + "'");
    } else if (section == "study") {
      if (key == "kind") {
        if (value == "run") cfg.study = StudyKind::run;
        else if (value == "sweep_alpha") cfg.study = StudyKind::sweep_alpha;
        else if (value == "single_step") cfg.study = StudyKind::single_step;
        else if (value == "order") cfg.study = StudyKind::order;
        else throw ConfigError("invalid value for 'study.kind': " + value);
      } else if (key == "alphas") cfg.alphas = parse_list(key, value);
      else if (key == "methods") {
        std::stringstream ms(value);
        std::string cell;
        while (std::getline(ms, cell, ','))
          if (!trim(cell).empty()) cfg.methods.push_back(method_from_name(trim(cell)));
      } else throw ConfigError("unknown key 'study." + key + "'");
    } else if (section == "output") {
      if (key == "directory") cfg.output_dir = value;
      else if (key == "formats") { /* csv+json always written */ }
      else throw ConfigError("unknown key 'output." + key + "'");
    } else {
      throw ConfigError("unknown section '" + section + "'");
    }
  }
  if (cfg.solver.tol <= 0) throw ConfigError("'tol' must be positive");
  if (cfg.solver.max_iter < 1) throw ConfigError("'max_iter' must be at least 1");
  if (cfg.solver.selection.kind == SelectionKind::cluster_lstsq &&
      (cfg.solver.selection.delta <= 0 || cfg.solver.selection.delta >= 1))
    throw ConfigError("'delta' must lie in (0, 1)");
  if (cfg.methods.empty()) cfg.methods.push_back(cfg.solver.method);
  return cfg;
}

} // namespace nepv
