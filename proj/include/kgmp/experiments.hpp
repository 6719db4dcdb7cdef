#pragma once
// Named experiments: each reads a resolved config, computes, and writes its artifacts.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "kgmp/ansatz.hpp"
#include "kgmp/artifacts.hpp"
#include "kgmp/config.hpp"
#include "kgmp/energy.hpp"
#include "kgmp/geometry_checks.hpp"
#include "kgmp/limit_profile.hpp"
#include "kgmp/nonlinear_solver.hpp"
#include "kgmp/psi.hpp"
#include "kgmp/reduction.hpp"

namespace kgmp {

enum ExitCode : int { exit_success = 0, exit_nonconvergence = 1, exit_config_error = 2 };

struct ExperimentOutcome {
  int exit_code = exit_success;
  std::vector<std::string> artifacts;
  std::string message;
};

namespace detail {

inline std::vector<std::size_t> gamma_argmax_nodes(const ProblemParams& prm) {
  double best = -1.0;
  std::vector<double> gam(prm.a.size());
  for (std::size_t k = 0; k < gam.size(); ++k) best = std::max(best, gam[k] = gamma_at_node(prm, k));
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < gam.size(); ++k)
    if (gam[k] >= best * (1 - 1e-12)) out.push_back(k);
  return out;
}

inline Point2 resolve_xi(const ManifoldGrid& g, const ProblemParams& prm, const ExperimentConfig& cfg) {
  if (cfg.options.xi) return g.node(g.nearest_node({(*cfg.options.xi)[0], (*cfg.options.xi)[1]}));
  return g.node(gamma_argmax_nodes(prm).front());
}

inline Json point_json(const Point2& p) { return Json::array({p[0], p[1]}); }

inline Json history_json(const std::vector<double>& h) { return Json(h); }

inline Field random_field(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(n);
  for (auto& x : f) x = dist(rng);
  return f;
}

inline std::vector<std::vector<double>> field_rows(const ManifoldGrid& g, const Field& u, const Field& psi) {
  std::vector<std::vector<double>> rows;
  rows.reserve(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point2 x = g.node(k);
    rows.push_back({x[0], x[1], u[k], psi[k]});
  }
  return rows;
}

}  // namespace detail

inline ExperimentOutcome run_ground_state(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg);
  const RadialProfile prof = solve_ground_state(cfg.options.dim, cfg.physics.p);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < prof.radii.size(); ++k) rows.push_back({prof.radii[k], prof.values[k], prof.derivative[k]});
  out.write_csv("profile.csv", {"r", "U", "Uprime"}, rows);
  const auto I = profile_integrals(prof);
  Json r;
  r["dim"] = prof.dim;
  r["p"] = prof.exponent_p;
  r["U0"] = prof.peak();
  r["truncation_radius"] = prof.truncation_radius;
  r["ode_residual"] = prof.residual;
  r["int_Up"] = I.int_Up;
  r["int_gradU_sq"] = I.int_gradU_sq;
  r["int_U_sq"] = I.int_U_sq;
  r["nehari_relative_error"] = std::fabs(I.int_gradU_sq + I.int_U_sq - I.int_Up) / I.int_Up;
  r["energy_constant"] = (0.5 - 1.0 / prof.exponent_p) * I.int_Up;
  out.write_json("ground_state.json", r);
  return {exit_success, out.written(), ""};
}

inline ExperimentOutcome run_psi_check(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg);
  const ManifoldGrid g = build_grid(cfg.manifold);
  const ProblemParams prm = build_params(g, cfg, cfg.epsilon_list.front());
  const PsiMap psi(g, prm);
  const double q = prm.q;
  const double lower_tol = g.kind == ManifoldKind::flat_torus ? 1e-9 : 1e-6;
  std::mt19937_64 rng(cfg.options.seed);
  double psi_min = 1e300, qpsi_max = -1e300, dpsi_min = 1e300, qdpsi_max = -1e300;
  std::size_t violations = 0;
  for (std::size_t s = 0; s < cfg.options.samples; ++s) {
    const Field u = detail::random_field(g.size(), rng, -2.0, 2.0);
    PsiState st = psi.at(u);
    const Field du = st.derivative(u);
    for (std::size_t k = 0; k < g.size(); ++k) {
      psi_min = std::min(psi_min, st.psi()[k]);
      qpsi_max = std::max(qpsi_max, q * st.psi()[k]);
      dpsi_min = std::min(dpsi_min, du[k]);
      qdpsi_max = std::max(qdpsi_max, q * du[k]);
      if (st.psi()[k] < -lower_tol || q * st.psi()[k] >= 1.0 || du[k] < -lower_tol || q * du[k] > 2.0 + 1e-9)
        ++violations;
    }
  }
  // Fréchet and Θ' finite-difference checks on one smooth pair
  const Field u = g.sample([](Point2 x) { return 1.0 + 0.5 * std::cos(x[0]) * std::sin(x[1]); });
  const Field h = g.sample([](Point2 x) { return std::sin(x[0] + 2 * x[1]); });
  PsiState st = psi.at(u);
  const Field dpsi = st.derivative(h);
  const double th0 = theta_from(g, prm, u, st.psi()), thp = theta_prime_from(g, prm, u, st.psi(), h);
  Json frechet = Json::array(), theta_fd = Json::array();
  for (double t : {1e-2, 1e-3}) {
    Field ut = u;
    axpy(t, h, ut);
    const Field pt = psi(ut);
    Field e = pt - st.psi();
    axpy(-t, dpsi, e);
    frechet.push_back({{"t", t}, {"error", max_abs(e)}});
    theta_fd.push_back({{"t", t}, {"error", std::fabs((theta_from(g, prm, ut, pt) - th0) / t - thp)}});
  }
  Json r;
  r["samples"] = cfg.options.samples;
  r["psi_min"] = psi_min;
  r["q_psi_max"] = qpsi_max;
  r["psi_prime_u_min"] = dpsi_min;
  r["q_psi_prime_u_max"] = qdpsi_max;
  r["lower_bound_tolerance"] = lower_tol;
  r["bound_violations"] = violations;
  r["frechet"] = frechet;
  r["theta_prime"] = theta_fd;
  out.write_json("psi_check.json", r);
  return {exit_success, out.written(), violations ? "bound violations reported" : ""};
}

inline ExperimentOutcome run_gradient_check(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg);
  const ManifoldGrid g = build_grid(cfg.manifold);
  const ProblemParams prm = build_params(g, cfg, cfg.epsilon_list.front());
  EnergyModel model(g, prm);
  std::mt19937_64 rng(cfg.options.seed);
  const double t = 1e-4;
  Json pairs = Json::array();
  double worst = 0.0;
  for (std::size_t s = 0; s < cfg.options.samples; ++s) {
    const Field u = detail::random_field(g.size(), rng, -0.5, 1.5);
    const Field phi = detail::random_field(g.size(), rng, -1.0, 1.0);
    Field up = u, um = u;
    axpy(t, phi, up);
    axpy(-t, phi, um);
    const double fd = (model.i_energy(up) - model.i_energy(um)) / (2 * t);
    const double an = model.space().inner(model.gradient(u), phi);
    const double rel = std::fabs(fd - an) / std::max(std::fabs(an), 1e-300);
    worst = std::max(worst, rel);
    pairs.push_back({{"finite_difference", fd}, {"gradient_pairing", an}, {"relative_error", rel}});
  }
  Json r;
  r["t"] = t;
  r["pairs"] = pairs;
  r["max_relative_error"] = worst;
  out.write_json("gradient_check.json", r);
  return {exit_success, out.written(), ""};
}

inline ExperimentOutcome run_gram(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg);
  const ManifoldGrid g = build_grid(cfg.manifold);
  const ProblemParams prm = build_params(g, cfg, cfg.epsilon_list.front());
  const RadialProfile prof = solve_ground_state(2, prm.p);
  const Point2 xi = detail::resolve_xi(g, prm, cfg);
  const std::size_t k = g.nearest_node(xi);
  const double d = prm.a[k] - prm.omega * prm.omega * prm.b[k];
  const auto [grad2, mass2] =
      kernel_mode_integrals(prof, ProfileScaling::from_coefficients(d, prm.b[k], prm.c[k], prm.p));
  const double oracle = prm.c[k] * grad2 + d * mass2;
  Json rows = Json::array();
  std::vector<std::vector<double>> csv;
  for (double eps : cfg.epsilon_list) {
    const Matrix2 m = gram_matrix(g, prm, prof, make_ansatz_spec(g, xi, eps));
    const double diag = std::max(std::fabs(m[0][0]), std::fabs(m[1][1]));
    const double off = std::fabs(m[0][1]) / diag;
    const double gap = std::max(std::fabs(m[0][0] - oracle), std::fabs(m[1][1] - oracle)) / oracle;
    rows.push_back({{"epsilon", eps}, {"G11", m[0][0]}, {"G12", m[0][1]}, {"G22", m[1][1]},
                    {"off_diagonal_ratio", off}, {"diagonal_relative_gap", gap}});
    csv.push_back({eps, m[0][0], m[0][1], m[1][1], off, gap});
  }
  out.write_csv("gram.csv", {"epsilon", "G11", "G12", "G22", "off_ratio", "diag_gap"}, csv);
  Json r;
  r["xi"] = detail::point_json(xi);
  r["oracle_diagonal"] = oracle;
  r["h_over_eps_min"] = g.h1 / cfg.epsilon_list.front();
  r["rows"] = rows;
  out.write_json("gram.json", r);
  return {exit_success, out.written(), ""};
}

inline ExperimentOutcome run_corrector(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg);
  const ManifoldGrid g = build_grid(cfg.manifold);
  const ProblemParams prm = build_params(g, cfg, cfg.epsilon_list.front());
  const RadialProfile prof = solve_ground_state(2, prm.p);
  const Point2 xi = detail::resolve_xi(g, prm, cfg);
  Json rows = Json::array();
  ExperimentOutcome res;
  for (double eps : cfg.epsilon_list) {
    Json row;
    row["epsilon"] = eps;
    try {
      CorrectorOptions opt;
      opt.tol = cfg.solver.tol;
      opt.max_iter = cfg.solver.max_iter;
      const auto c = CorrectorSolver(g, prm, prof, make_ansatz_spec(g, xi, eps), opt).solve();
      row["norm_eps"] = c.norm_eps;
      row["norm_over_eps"] = c.norm_eps / eps;
      row["residual"] = c.residual;
      row["iterations"] = c.iterations;
      row["orthogonality"] = c.orthogonality;
      row["damped"] = c.damped;
      row["norm_history"] = c.norm_history;
      row["residual_history"] = c.residual_history;
    } catch (const ConvergenceError& e) {
      row["failed"] = true;
      row["failure"] = e.what();
      row["residual_history"] = e.history();
      res.exit_code = exit_nonconvergence;
      res.message = e.what();
    }
    rows.push_back(row);
    if (res.exit_code != exit_success) break;
  }
  Json r;
  r["xi"] = detail::point_json(xi);
  r["rows"] = rows;
  out.write_json("corrector.json", r);
  res.artifacts = out.written();
  return res;
}

inline ExperimentOutcome run_landscape(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg);
  const ManifoldGrid g = build_grid(cfg.manifold);
  const ProblemParams prm = build_params(g, cfg, cfg.epsilon_list.front());
  const RadialProfile prof = solve_ground_state(2, prm.p);
  const double C = (0.5 - 1.0 / prm.p) * profile_integrals(prof).int_Up;
  LandscapeOptions opt;
  opt.xi_per_side = cfg.options.xi_per_side;
  opt.with_corrector = cfg.options.with_corrector;
  opt.reference_C = C;
  opt.corrector.tol = cfg.solver.tol;
  Json scans = Json::array();
  for (double eps : cfg.epsilon_list) {
    const LandscapeTable tab = landscape_scan(g, prm, prof, eps, opt);
    std::vector<std::vector<double>> rows;
    for (const auto& row : tab.rows) rows.push_back({row.xi[0], row.xi[1], row.i_tilde, row.gamma, row.ratio});
    out.write_csv("landscape_eps_" + epsilon_tag(eps) + ".csv", {"xi1", "xi2", "I_tilde", "Gamma", "ratio"}, rows);
    const Point2 xa = tab.rows[tab.argmax_i_tilde].xi, xg = tab.rows[tab.argmax_gamma].xi;
    scans.push_back({{"epsilon", eps},
                     {"fitted_C", tab.fitted_C},
                     {"max_deviation", tab.max_deviation},
                     {"argmax_I_tilde", detail::point_json(xa)},
                     {"argmax_Gamma", detail::point_json(xg)},
                     {"argmax_distance", geodesic_distance(g, xa, xg)}});
  }
  Json r;
  r["reference_C"] = C;
  r["xi_cell"] = g.period1 / static_cast<double>(cfg.options.xi_per_side);
  r["scans"] = scans;
  out.write_json("landscape.json", r);
  return {exit_success, out.written(), ""};
}

inline ExperimentOutcome run_solve(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg);
  const ManifoldGrid g = build_grid(cfg.manifold);
  const double eps = cfg.epsilon_list.front();
  const ProblemParams prm = build_params(g, cfg, eps);
  const RadialProfile prof = solve_ground_state(2, prm.p);
  const Point2 xi = detail::resolve_xi(g, prm, cfg);
  EnergyModel model(g, prm);
  const Field u0 = AnsatzBuilder(g, prm, prof).build_W(make_ansatz_spec(g, xi, eps));
  NewtonOptions opt;
  opt.tol = cfg.solver.tol;
  opt.max_iter = cfg.solver.max_iter;
  Json r;
  r["epsilon"] = eps;
  r["xi_start"] = detail::point_json(xi);
  try {
    const NewtonResult nr = newton_solve(model, u0, opt);
    const auto cp = concentration_point(g, nr.u);
    const auto sr = system_residual(model, nr.u, nr.psi);
    r["converged"] = true;
    r["iterations"] = nr.iterations;
    r["residual"] = nr.residual;
    r["residual_history"] = nr.residual_history;
    r["krylov_iterations"] = nr.krylov_iterations;
    r["trivial"] = nr.trivial;
    r["positive"] = nr.positive;
    r["concentration_point"] = detail::point_json(cp.point);
    r["peak"] = nr.u[cp.node];
    r["energy"] = model.i_energy(nr.u);
    r["system_residual"] = {{"u_equation", sr.u_equation}, {"v_equation", sr.v_equation}};
    out.write_csv("field_eps_" + epsilon_tag(eps) + ".csv", {"x", "y", "u", "psi"},
                  detail::field_rows(g, nr.u, nr.psi));
    out.write_json("solve.json", r);
    return {exit_success, out.written(), ""};
  } catch (const ConvergenceError& e) {
    r["converged"] = false;
    r["failure"] = e.what();
    r["residual_history"] = e.history();
    out.write_json("solve.json", r);
    return {exit_nonconvergence, out.written(), e.what()};
  }
}

inline ExperimentOutcome run_continuation(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg);
  const ManifoldGrid g = build_grid(cfg.manifold);
  const ProblemParams prm = build_params(g, cfg, cfg.epsilon_list.front());
  const RadialProfile prof = solve_ground_state(2, prm.p);
  const Point2 xi = detail::resolve_xi(g, prm, cfg);
  ContinuationOptions opt;
  opt.newton.tol = cfg.solver.tol;
  opt.newton.max_iter = cfg.solver.max_iter;
  const auto ties = detail::gamma_argmax_nodes(prm);
  const bool truncated = ties.size() > 16;
  if (!truncated)
    for (std::size_t k : ties) opt.targets.push_back(g.node(k));
  const ContinuationReport rep = continuation_run(g, prm, prof, cfg.epsilon_list, xi, opt);
  Json stages = Json::array();
  for (std::size_t s = 0; s < rep.stages.size(); ++s) {
    const auto& st = rep.stages[s];
    Json j;
    j["epsilon"] = st.epsilon;
    j["failed"] = st.failed;
    if (st.failed) {
      j["failure"] = st.failure;
    } else {
      j["concentration_point"] = detail::point_json(st.concentration);
      j["distance"] = st.distance;
      j["distance_over_eps"] = st.distance / st.epsilon;
      j["peak"] = st.peak;
      j["residual"] = st.residual;
      j["energy"] = st.energy;
      j["gamma_at_peak"] = st.gamma_at_peak;
      j["phi_proxy"] = st.phi_proxy;
      j["system_residual"] = {{"u_equation", st.system.u_equation}, {"v_equation", st.system.v_equation}};
      j["newton_iterations"] = st.newton_iterations;
      j["positive"] = st.positive;
    }
    j["residual_history"] = st.residual_history;
    stages.push_back(j);
    if (!st.failed && s < rep.solutions.size())
      out.write_csv("field_eps_" + epsilon_tag(st.epsilon) + ".csv", {"x", "y", "u", "psi"},
                    detail::field_rows(g, rep.solutions[s], rep.potentials[s]));
  }
  Json r;
  r["xi_start"] = detail::point_json(xi);
  Json targets = Json::array();
  for (const auto& t : (opt.targets.empty() ? std::vector<Point2>{xi} : opt.targets)) targets.push_back(detail::point_json(t));
  r["targets"] = targets;
  r["targets_truncated"] = truncated;
  r["reference_C"] = (0.5 - 1.0 / prm.p) * profile_integrals(prof).int_Up;
  r["stages"] = stages;
  r["distances_non_increasing"] = rep.distances_non_increasing;
  r["complete"] = rep.complete;
  out.write_json("continuation.json", r);
  if (!rep.complete) return {exit_nonconvergence, out.written(), rep.stages.back().failure};
  return {exit_success, out.written(), ""};
}

inline ExperimentOutcome run_lift_check(const ExperimentConfig& cfg) {
  if (cfg.manifold.kind != "flat_torus") throw ConfigError("lift-check: the base manifold must be a flat torus");
  if (cfg.options.k < 1) throw ConfigError("lift-check: fiber dimension k must be at least 1");
  ArtifactWriter out(cfg);
  const Expression fexpr(cfg.options.warp_f), bexpr(cfg.options.beta_spec);
  WarpedProblem wp;
  wp.f = [fexpr](Point2 x) { return fexpr(x); };
  wp.beta = [bexpr](Point2 x) { return bexpr(x); };
  wp.k = cfg.options.k;
  wp.epsilon = cfg.epsilon_list.front();
  wp.q = cfg.physics.q;
  wp.omega = cfg.physics.omega;
  wp.p = cfg.physics.p;
  const RadialProfile prof = solve_ground_state(2, wp.p);
  NewtonOptions nopt;
  nopt.tol = cfg.solver.tol;
  nopt.max_iter = cfg.solver.max_iter;
  Json levels = Json::array();
  std::vector<double> floors;
  ExperimentOutcome res;
  for (std::size_t n : {cfg.manifold.N, 2 * cfg.manifold.N}) {
    const ManifoldGrid g = build_flat_torus(cfg.manifold.L, n);
    const ProblemParams prm = wp.base_params(g);
    prm.validate(g);
    const Point2 xi = g.node(detail::gamma_argmax_nodes(prm).front());
    EnergyModel model(g, prm);
    Json lv;
    lv["N"] = n;
    lv["h"] = g.h1;
    try {
      const NewtonResult nr =
          newton_solve(model, AnsatzBuilder(g, prm, prof).build_W(make_ansatz_spec(g, xi, wp.epsilon)), nopt);
      const auto sr = system_residual(model, nr.u, nr.psi);
      lv["newton_residual"] = nr.residual;
      lv["system_residual"] = {{"u_equation", sr.u_equation}, {"v_equation", sr.v_equation}};
      if (wp.k == 1) {
        const LiftReport lr = warped_lift_residual(g, wp, nr.u, nr.psi, cfg.options.fiber_nodes);
        lv["base_residual"] = {{"u_equation", lr.base.u_equation}, {"v_equation", lr.base.v_equation}};
        lv["lifted_residual"] = {{"u_equation", lr.lifted.u_equation}, {"v_equation", lr.lifted.v_equation}};
        lv["floor"] = {{"u_equation", lr.floor.u_equation}, {"v_equation", lr.floor.v_equation}};
        lv["fiber_derivative"] = lr.fiber_derivative;
        lv["lift_bound_holds"] = lr.lifted.max() <= 10 * lr.base.max() + lr.floor.max();
        floors.push_back(lr.floor.max());
      } else {
        const auto br = warped_base_residual(g, wp, nr.u, nr.psi);
        lv["base_residual"] = {{"u_equation", br.u_equation}, {"v_equation", br.v_equation}};
      }
    } catch (const ConvergenceError& e) {
      lv["failure"] = e.what();
      res.exit_code = exit_nonconvergence;
      res.message = e.what();
    }
    levels.push_back(lv);
    if (res.exit_code != exit_success) break;
  }
  // Γ transport: the reduction module's Γ of the weighted base problem against the lifted closed form
  const ManifoldGrid g = build_flat_torus(cfg.manifold.L, cfg.manifold.N);
  const ProblemParams prm = wp.base_params(g);
  std::vector<LiftInputs> samples;
  double max_rel = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point2 x = g.node(k);
    const LiftInputs in{2, wp.p, wp.beta(x) - wp.omega * wp.omega, wp.f(x), wp.k, 1.0};
    samples.push_back(in);
    const double lifted = gamma_lifted(LiftKind::warped, in);
    max_rel = std::max(max_rel, std::fabs(gamma_at_node(prm, k) - lifted) / lifted);
  }
  const auto gl = verify_gamma_lift(LiftKind::warped, samples);
  Json r;
  r["epsilon"] = wp.epsilon;
  r["levels"] = levels;
  if (floors.size() == 2) r["floor_ratio"] = floors[0] / floors[1];
  r["gamma_route_max_relative_difference"] = std::max(max_rel, gl.max_relative_difference);
  out.write_json("lift_check.json", r);
  res.artifacts = out.written();
  return res;
}

inline ExperimentOutcome run_hopf_check(const ExperimentConfig& cfg) {
  ArtifactWriter out(cfg);
  const std::vector<std::pair<std::string, std::function<double(double, double)>>> cases{
      {"constant", [](double, double) { return 1.0; }},
      {"height", [](double th, double) { return std::cos(th); }},
      {"degree_two", [](double th, double ph) { return std::sin(th) * std::cos(th) * std::cos(ph); }}};
  Json rows = Json::array();
  for (const auto& [name, u] : cases) {
    Json errs = Json::array(), ratios = Json::array();
    std::size_t used = 0, excluded = 0;
    double prev = -1.0;
    for (double h : cfg.options.h_fd) {
      const HopfReport rep = hopf_commutation_error(u, cfg.options.samples, h, cfg.options.seed);
      errs.push_back(rep.max_error);
      if (prev > 0.0 && rep.max_error > 0.0) ratios.push_back(prev / rep.max_error);
      prev = rep.max_error;
      used = rep.samples_used;
      excluded = rep.samples_excluded;
    }
    rows.push_back({{"test_function", name}, {"h_fd", cfg.options.h_fd}, {"max_error", errs},
                    {"ratios", ratios}, {"samples_used", used}, {"samples_excluded", excluded}});
  }
  Json r;
  r["cases"] = rows;
  out.write_json("hopf_check.json", r);
  return {exit_success, out.written(), ""};
}

inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  static const std::map<std::string, std::function<ExperimentOutcome(const ExperimentConfig&)>> table{
      {"ground-state", run_ground_state}, {"psi-check", run_psi_check},       {"gradient-check", run_gradient_check},
      {"gram", run_gram},                 {"corrector", run_corrector},       {"landscape", run_landscape},
      {"solve", run_solve},               {"continuation", run_continuation}, {"lift-check", run_lift_check},
      {"hopf-check", run_hopf_check}};
  const auto it = table.find(cfg.experiment);
  if (it == table.end()) {
    std::string list;
    for (const auto& n : experiment_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown experiment '" + cfg.experiment + "'; valid names: " + list);
  }
  return it->second(cfg);
}

}  // namespace kgmp
