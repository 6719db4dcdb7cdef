#pragma once
// Experiment configuration: JSON file plus command-line overrides, resolved with defaults.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgmp/common.hpp"
#include "kgmp/elliptic.hpp"
#include "kgmp/expression.hpp"
#include "kgmp/manifold.hpp"

namespace kgmp {

inline constexpr int schema_version = 1;

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"ground-state", "psi-check",  "gradient-check", "gram",
                                              "corrector",    "landscape",  "solve",          "continuation",
                                              "lift-check",   "hopf-check"};
  return names;
}

struct ManifoldConfig {
  std::string kind = "flat_torus";
  double L = 2 * pi;
  std::string f_spec = "2 + cos(t)";
  std::size_t N = 128;
};

struct CoefficientConfig {
  std::string a_spec = "1";
  std::string b_spec = "1";
  std::string c_spec = "1";
};

struct PhysicsConfig {
  double p = 4.0;
  double q = 1.0;
  double omega = 0.0;
};

struct SolverConfig {
  double tol = 1e-8;
  int max_iter = 40;
};

/// Knobs of individual experiments; every field has a default so configs stay short.
struct ExperimentOptions {
  int dim = 2;                          // ground-state
  std::optional<std::vector<double>> xi;  // gram, corrector, solve, continuation; default argmax Γ
  std::size_t xi_per_side = 16;         // landscape
  bool with_corrector = false;          // landscape
  std::size_t samples = 100;            // psi-check, gradient-check, hopf-check
  unsigned seed = 2024;
  std::vector<double> h_fd{0.02, 0.01, 0.005};  // hopf-check
  std::string warp_f = "2 + cos(x)";    // lift-check weight f on the base
  std::string beta_spec = "1";          // lift-check
  int k = 1;                            // lift-check fiber dimension
  std::size_t fiber_nodes = 8;          // lift-check
};

struct ExperimentConfig {
  std::string experiment;
  ManifoldConfig manifold;
  CoefficientConfig coefficients;
  PhysicsConfig physics;
  std::vector<double> epsilon_list{0.1};
  SolverConfig solver;
  std::string output_dir = "kgmp_out";
  ExperimentOptions options;
};

namespace detail {

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

inline const nlohmann::json& object_or_empty(const nlohmann::json& j, const char* key) {
  static const nlohmann::json empty = nlohmann::json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(std::string("config field '") + key + "' must be an object");
  return j.at(key);
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  if (!c.experiment.empty()) {
    bool known = false;
    for (const auto& n : experiment_names()) known = known || n == c.experiment;
    if (!known) {
      std::string list;
      for (const auto& n : experiment_names()) list += (list.empty() ? "" : ", ") + n;
      throw ConfigError("unknown experiment '" + c.experiment + "'; valid names: " + list);
    }
  }
  if (c.manifold.kind != "flat_torus" && c.manifold.kind != "surface_of_revolution")
    throw ConfigError("manifold.kind must be flat_torus or surface_of_revolution");
  if (!(c.manifold.L > 0)) throw ConfigError("manifold.L must be positive");
  if (c.manifold.N < 16) throw ConfigError("manifold.N must be at least 16");
  Expression(c.coefficients.a_spec);
  Expression(c.coefficients.b_spec);
  Expression(c.coefficients.c_spec);
  Expression(c.manifold.f_spec);
  Expression(c.options.warp_f);
  Expression(c.options.beta_spec);
  if (!(c.physics.p > 2)) throw ConfigError("physics.p must exceed 2");
  if (!(c.physics.q > 0)) throw ConfigError("physics.q must be positive");
  if (c.epsilon_list.empty()) throw ConfigError("epsilon_list must not be empty");
  for (double e : c.epsilon_list)
    if (!(e > 0)) throw ConfigError("epsilon_list entries must be positive");
  if (!(c.solver.tol > 0)) throw ConfigError("solver.tol must be positive");
  if (c.solver.max_iter < 1) throw ConfigError("solver.max_iter must be at least 1");
  if (c.options.dim < 1 || c.options.dim > 3) throw ConfigError("options.dim must be 1, 2 or 3");
  if (c.options.xi && c.options.xi->size() != 2) throw ConfigError("options.xi must have two entries");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  using detail::read_if;
  read_if(j, "experiment", c.experiment);
  const auto& m = detail::object_or_empty(j, "manifold");
  read_if(m, "kind", c.manifold.kind);
  read_if(m, "L", c.manifold.L);
  read_if(m, "f_spec", c.manifold.f_spec);
  read_if(m, "N", c.manifold.N);
  const auto& co = detail::object_or_empty(j, "coefficients");
  read_if(co, "a_spec", c.coefficients.a_spec);
  read_if(co, "b_spec", c.coefficients.b_spec);
  read_if(co, "c_spec", c.coefficients.c_spec);
  const auto& ph = detail::object_or_empty(j, "physics");
  read_if(ph, "p", c.physics.p);
  read_if(ph, "q", c.physics.q);
  read_if(ph, "omega", c.physics.omega);
  read_if(j, "epsilon_list", c.epsilon_list);
  const auto& so = detail::object_or_empty(j, "solver");
  read_if(so, "tol", c.solver.tol);
  read_if(so, "max_iter", c.solver.max_iter);
  read_if(j, "output_dir", c.output_dir);
  const auto& op = detail::object_or_empty(j, "options");
  read_if(op, "dim", c.options.dim);
  if (op.contains("xi")) {
    std::vector<double> xi;
    read_if(op, "xi", xi);
    c.options.xi = xi;
  }
  read_if(op, "xi_per_side", c.options.xi_per_side);
  read_if(op, "with_corrector", c.options.with_corrector);
  read_if(op, "samples", c.options.samples);
  read_if(op, "seed", c.options.seed);
  read_if(op, "h_fd", c.options.h_fd);
  read_if(op, "warp_f", c.options.warp_f);
  read_if(op, "beta_spec", c.options.beta_spec);
  read_if(op, "k", c.options.k);
  read_if(op, "fiber_nodes", c.options.fiber_nodes);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

/// The fully resolved config, defaults included, as embedded in every artifact.
inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = c.experiment;
  j["manifold"]["kind"] = c.manifold.kind;
  if (c.manifold.kind == "flat_torus") j["manifold"]["L"] = c.manifold.L;
  else j["manifold"]["f_spec"] = c.manifold.f_spec;
  j["manifold"]["N"] = c.manifold.N;
  j["coefficients"]["a_spec"] = c.coefficients.a_spec;
  j["coefficients"]["b_spec"] = c.coefficients.b_spec;
  j["coefficients"]["c_spec"] = c.coefficients.c_spec;
  j["physics"]["p"] = c.physics.p;
  j["physics"]["q"] = c.physics.q;
  j["physics"]["omega"] = c.physics.omega;
  j["epsilon_list"] = c.epsilon_list;
  j["solver"]["tol"] = c.solver.tol;
  j["solver"]["max_iter"] = c.solver.max_iter;
  j["output_dir"] = c.output_dir;
  auto& o = j["options"];
  o["dim"] = c.options.dim;
  if (c.options.xi) o["xi"] = *c.options.xi;
  o["xi_per_side"] = c.options.xi_per_side;
  o["with_corrector"] = c.options.with_corrector;
  o["samples"] = c.options.samples;
  o["seed"] = c.options.seed;
  o["h_fd"] = c.options.h_fd;
  o["warp_f"] = c.options.warp_f;
  o["beta_spec"] = c.options.beta_spec;
  o["k"] = c.options.k;
  o["fiber_nodes"] = c.options.fiber_nodes;
  return j;
}

inline ManifoldGrid build_grid(const ManifoldConfig& m) {
  if (m.kind == "flat_torus") return build_flat_torus(m.L, m.N);
  const Expression f(m.f_spec);
  return build_surface_of_revolution(WarpFunction{[f](double t) { return f(t, 0.0); }, nullptr, m.f_spec}, m.N, m.N);
}

inline ProblemParams build_params(const ManifoldGrid& g, const ExperimentConfig& c, double epsilon) {
  const Expression a(c.coefficients.a_spec), b(c.coefficients.b_spec), cc(c.coefficients.c_spec);
  ProblemParams prm{g.sample(a), g.sample(b), g.sample(cc), epsilon, c.physics.q, c.physics.omega, c.physics.p};
  prm.validate(g);
  return prm;
}

}  // namespace kgmp
