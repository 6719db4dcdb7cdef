#pragma once
// Command-line front end: one subcommand per experiment, plus `run CONFIG` and `plots DIR`.
// Flags override the config file. Exit codes: 0 success, 1 non-convergence, 2 config error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgmp/config.hpp"
#include "kgmp/experiments.hpp"
#include "kgmp/plots.hpp"

namespace kgmp {

struct CliOverrides {
  std::optional<std::string> kind, f_spec, a_spec, b_spec, c_spec, output_dir, warp_f, beta_spec;
  std::optional<double> L, p, q, omega, tol;
  std::optional<std::size_t> N, xi_per_side, samples, fiber_nodes;
  std::optional<int> max_iter, dim, k;
  std::optional<unsigned> seed;
  std::vector<double> eps, h_fd, xi;
  bool with_corrector = false;

  void add_to(CLI::App* app) {
    app->add_option("--kind", kind, "manifold kind: flat_torus or surface_of_revolution");
    app->add_option("--L", L, "flat torus side length");
    app->add_option("--f-spec", f_spec, "warping profile f(t) of a surface of revolution");
    app->add_option("--N", N, "nodes per chart direction");
    app->add_option("--a", a_spec, "coefficient a(x, y)");
    app->add_option("--b", b_spec, "coefficient b(x, y)");
    app->add_option("--c", c_spec, "coefficient c(x, y)");
    app->add_option("--p", p, "nonlinearity exponent");
    app->add_option("--q", q, "coupling q");
    app->add_option("--omega", omega, "frequency omega");
    app->add_option("--eps", eps, "epsilon list");
    app->add_option("--tol", tol, "solver tolerance");
    app->add_option("--max-iter", max_iter, "solver iteration cap");
    app->add_option("--output-dir", output_dir, "artifact directory");
    app->add_option("--dim", dim, "ground-state dimension");
    app->add_option("--xi", xi, "anchor point xi (two values)")->expected(2);
    app->add_option("--xi-per-side", xi_per_side, "landscape xi-grid size");
    app->add_flag("--with-corrector", with_corrector, "landscape with the corrector");
    app->add_option("--samples", samples, "sample count");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--h-fd", h_fd, "finite-difference steps for hopf-check");
    app->add_option("--warp-f", warp_f, "lift-check weight f(x, y)");
    app->add_option("--beta", beta_spec, "lift-check beta(x, y)");
    app->add_option("--k", k, "lift-check fiber dimension");
    app->add_option("--fiber-nodes", fiber_nodes, "lift-check fiber resolution");
  }

  void apply(ExperimentConfig& c) const {
    if (kind) c.manifold.kind = *kind;
    if (L) c.manifold.L = *L;
    if (f_spec) c.manifold.f_spec = *f_spec;
    if (N) c.manifold.N = *N;
    if (a_spec) c.coefficients.a_spec = *a_spec;
    if (b_spec) c.coefficients.b_spec = *b_spec;
    if (c_spec) c.coefficients.c_spec = *c_spec;
    if (p) c.physics.p = *p;
    if (q) c.physics.q = *q;
    if (omega) c.physics.omega = *omega;
    if (!eps.empty()) c.epsilon_list = eps;
    if (tol) c.solver.tol = *tol;
    if (max_iter) c.solver.max_iter = *max_iter;
    if (output_dir) c.output_dir = *output_dir;
    if (dim) c.options.dim = *dim;
    if (!xi.empty()) c.options.xi = xi;
    if (xi_per_side) c.options.xi_per_side = *xi_per_side;
    if (with_corrector) c.options.with_corrector = true;
    if (samples) c.options.samples = *samples;
    if (seed) c.options.seed = *seed;
    if (!h_fd.empty()) c.options.h_fd = h_fd;
    if (warp_f) c.options.warp_f = *warp_f;
    if (beta_spec) c.options.beta_spec = *beta_spec;
    if (k) c.options.k = *k;
    if (fiber_nodes) c.options.fiber_nodes = *fiber_nodes;
  }
};

inline int cli_main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"kgmp: semiclassical KGMP numerical lab"};
  app.require_subcommand(1);
  CliOverrides ov;
  std::string config_path, run_path, plot_dir;

  std::vector<std::pair<std::string, CLI::App*>> named;
  for (const auto& name : experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file");
    ov.add_to(sub);
    named.push_back({name, sub});
  }
  CLI::App* run = app.add_subcommand("run", "run the experiment named in a config file");
  run->add_option("config", run_path, "JSON config file")->required();
  ov.add_to(run);
  CLI::App* plots = app.add_subcommand("plots", "emit SVG figures from an artifact directory");
  plots->add_option("dir", plot_dir, "artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_success;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_success;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_config_error;
  }

  try {
    if (plots->parsed()) {
      const PlotReport rep = emit_plots(plot_dir);
      for (const auto& s : rep.written) out << "wrote " << s << '\n';
      for (const auto& s : rep.skipped) err << "skipped: " << s << '\n';
      for (const auto& s : rep.warnings) err << "warning: " << s << '\n';
      return exit_success;
    }
    ExperimentConfig cfg;
    if (run->parsed()) {
      cfg = load_config(run_path);
    } else {
      for (const auto& [name, sub] : named)
        if (sub->parsed()) {
          if (!config_path.empty()) cfg = load_config(config_path);
          cfg.experiment = name;
        }
    }
    ov.apply(cfg);
    const ExperimentOutcome res = run_experiment(cfg);
    for (const auto& s : res.artifacts) out << "wrote " << s << '\n';
    if (!res.message.empty()) err << (res.exit_code ? "error: " : "note: ") << res.message << '\n';
    return res.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const ConvergenceError& e) {
    err << "non-convergence: " << e.what() << '\n';
    return exit_nonconvergence;
  }
}

}  // namespace kgmp
