#pragma once
// Newton–Krylov for -ε²div_g(c∇u) + d u + ω²qbΨ(u)(2 - qΨ(u))u = b(u⁺)^{p-1},
// concentration diagnostics and ε-continuation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kgmp/ansatz.hpp"
#include "kgmp/common.hpp"
#include "kgmp/energy.hpp"
#include "kgmp/reduction.hpp"

namespace kgmp {

struct NewtonOptions {
  double tol = 1e-8;
  int max_iter = 40;
  double inner_tol = 1e-3;
  int gmres_restart = 50;
  int gmres_max_iter = 400;
  int max_backtracks = 20;
  bool positivity_sweeps = true;
};

struct NewtonResult {
  Field u;
  Field psi;
  std::vector<double> residual_history;  ///< ‖∇I_ε(u)‖_ε per iterate, starting with u0
  std::vector<int> krylov_iterations;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool trivial = false;   ///< converged to u ≤ 0
  bool positive = false;  ///< u > 0 at every node
};

/// System residuals of the pair (u, v): the u-equation measured as ‖i*_ε(r₁)‖_ε with the
/// coefficient a (not d), the v-equation as max nodal residual over max |b q u²|.
struct SystemResidual {
  double u_equation = 0.0;
  double v_equation = 0.0;
};

inline SystemResidual system_residual(EnergyModel& model, const Field& u, const Field& v) {
  const auto& prm = model.params();
  const ManifoldGrid& g = model.grid();
  const std::size_t n = u.size();
  const double e2 = prm.epsilon * prm.epsilon, w2 = prm.omega * prm.omega;
  const DiscreteOperator stiff = assemble_stiffness(g, prm.c);
  SystemResidual out;
  Field r1 = stiff(u);
  r1 *= e2;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = prm.q * v[k] - 1.0;
    r1[k] += g.measure[k] * (prm.a[k] * u[k] - w2 * prm.b[k] * t * t * u[k] -
                             prm.b[k] * positive_power(u[k], prm.p - 1.0));
  }
  // r1 is in weighted form already; i*_ε expects a density, so undo the weight first
  for (std::size_t k = 0; k < n; ++k) r1[k] /= g.measure[k];
  out.u_equation = model.space().norm(model.space().istar(r1));
  Field r2 = stiff(v);
  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double src = prm.b[k] * prm.q * u[k] * u[k];
    r2[k] = r2[k] / g.measure[k] + prm.b[k] * (1.0 + prm.q * prm.q * u[k] * u[k]) * v[k] - src;
    scale = std::max(scale, std::fabs(src));
    out.v_equation = std::max(out.v_equation, std::fabs(r2[k]));
  }
  if (scale > 0) out.v_equation /= scale;
  return out;
}

namespace detail {

/// Gauss–Seidel sweeps on (K_ε + W ω²qbΨ(2-qΨ)) u = W b (u⁺)^{p-1} with Ψ and the right-hand
/// side frozen. The matrix is an M-matrix, so sweeps from a nonnegative start stay nonnegative
/// and spread strict positivity one node per sweep.
inline void positivity_sweeps(EnergyModel& model, Field& u, const Field& psi) {
  const auto& prm = model.params();
  const ManifoldGrid& g = model.grid();
  const DiscreteOperator& op = model.space().op();
  const std::size_t n1 = g.n1, n2 = g.n2, n = u.size();
  const double w2 = prm.omega * prm.omega;
  Field rhs(n), diag(n);
  const auto dg = op.diagonal();
  for (std::size_t k = 0; k < n; ++k) {
    rhs[k] = g.measure[k] * prm.b[k] * positive_power(u[k], prm.p - 1.0);
    diag[k] = dg[k] + g.measure[k] * w2 * prm.q * prm.b[k] * psi[k] * (2.0 - prm.q * psi[k]);
    u[k] = std::max(u[k], 0.0);
  }
  const std::size_t max_sweeps = 2 * (n1 + n2);
  for (std::size_t s = 0; s < max_sweeps; ++s) {
    bool all_positive = true;
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) {
        const std::size_t k = i * n2 + j;
        const std::size_t ke = ((i + 1) % n1) * n2 + j, kw = ((i + n1 - 1) % n1) * n2 + j;
        const std::size_t kn = i * n2 + (j + 1) % n2, ks = i * n2 + (j + n2 - 1) % n2;
        const double off = op.east[k] * u[ke] + op.east[kw] * u[kw] + op.north[k] * u[kn] +
                           op.north[ks] * u[ks];
        u[k] = (rhs[k] + off) / diag[k];
        if (!(u[k] > 0.0)) all_positive = false;
      }
    if (all_positive) break;
  }
}

}  // namespace detail

/// Newton–Krylov on G(u) = u - i*_ε[b f(u) + ω² b g(u)] with backtracking on ‖G‖_ε.
inline NewtonResult newton_solve(EnergyModel& model, const Field& u0, const NewtonOptions& opt = {}) {
  const auto& prm = model.params();
  const std::size_t n = u0.size();
  const double w2 = prm.omega * prm.omega, q = prm.q;
  NewtonResult res;
  Field u = u0;
  auto evaluate = [&](const Field& x, std::optional<PsiState>& st) {
    st.emplace(model.psi_map().at(x));
    return model.gradient_from(x, st->psi());
  };
  std::optional<PsiState> state;
  Field G = evaluate(u, state);
  double gnorm = model.space().norm(G);
  res.residual_history.push_back(gnorm);
  for (int it = 0; it < opt.max_iter && !(gnorm < opt.tol); ++it) {
    const Field& psi = state->psi();
    Field fp(n), gcoef(n), mix(n);
    for (std::size_t k = 0; k < n; ++k) {
      fp[k] = prm.b[k] * nonlinearity_f_prime(u[k], prm.p);
      gcoef[k] = w2 * prm.b[k] * (q * q * psi[k] * psi[k] - 2.0 * q * psi[k]);
      mix[k] = w2 * prm.b[k] * (2.0 * q * q * psi[k] - 2.0 * q) * u[k];
    }
    LinearMap jac = [&](const Field& h, Field& out) {
      Field src(n);
      for (std::size_t k = 0; k < n; ++k) src[k] = (fp[k] + gcoef[k]) * h[k];
      if (w2 != 0.0) {
        const Field dpsi = state->derivative(h);
        for (std::size_t k = 0; k < n; ++k) src[k] += mix[k] * dpsi[k];
      }
      out = h - model.space().istar(src);
    };
    LinearMap id = [](const Field& v, Field& out) { out = v; };
    Field rhs = (-1.0) * G;
    Field delta(n, 0.0);
    const auto rep = gmres(jac, id, rhs, delta, opt.inner_tol, opt.gmres_restart, opt.gmres_max_iter);
    res.krylov_iterations.push_back(rep.iterations);
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      Field trial = u;
      axpy(lambda, delta, trial);
      std::optional<PsiState> st;
      Field Gt = evaluate(trial, st);
      const double tn = model.space().norm(Gt);
      if (tn < (1.0 - 1e-4 * lambda) * gnorm) {
        u = std::move(trial);
        G = std::move(Gt);
        state = std::move(st);
        gnorm = tn;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    res.iterations = it + 1;
    res.residual_history.push_back(gnorm);
    if (!accepted) break;
  }
  res.residual = gnorm;
  res.converged = gnorm < opt.tol;
  if (!res.converged) {
    res.u = u;
    throw ConvergenceError("newton: stagnation, residual " + std::to_string(gnorm),
                           res.residual_history);
  }
  double umax = -std::numeric_limits<double>::infinity();
  for (double x : u) umax = std::max(umax, x);
  res.trivial = !(umax > 1e-8);
  if (!res.trivial && opt.positivity_sweeps) {
    detail::positivity_sweeps(model, u, state->psi());
    state.emplace(model.psi_map().at(u));
    res.residual = model.space().norm(model.gradient_from(u, state->psi()));
    res.residual_history.push_back(res.residual);
  }
  res.positive = std::all_of(u.begin(), u.end(), [](double x) { return x > 0.0; });
  res.psi = state->psi();
  res.u = std::move(u);
  return res;
}

inline NewtonResult newton_solve(const ManifoldGrid& g, const ProblemParams& prm, const Field& u0,
                                 double tol, int max_iter) {
  EnergyModel model(g, prm);
  NewtonOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return newton_solve(model, u0, opt);
}

/// Positive constant root of d u + ω²qbΨ₀(2 - qΨ₀)u = b u^{p-1} with Ψ₀ = qu²/(1+q²u²).
inline double constant_branch(double a, double b, double omega, double q, double p) {
  const double d = a - omega * omega * b;
  auto F = [&](double u) {
    const double psi = q * u * u / (1 + q * q * u * u);
    return d + omega * omega * q * b * psi * (2 - q * psi) - b * std::pow(u, p - 2);
  };
  double lo = 1e-12, hi = 1.0;
  while (F(hi) > 0) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct ConcentrationPoint {
  Point2 point;
  std::size_t node = 0;
  std::vector<std::size_t> ties;  ///< every node within 1e-10 of the maximum (first one returned)
  bool tied = false;
};

/// Argmax node refined by a separable quadratic fit on the 3×3 neighbourhood.
inline ConcentrationPoint concentration_point(const ManifoldGrid& g, const Field& u) {
  ConcentrationPoint cp;
  double umax = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k)
    if (u[k] > umax) {
      umax = u[k];
      cp.node = k;
    }
  const double tie_tol = 1e-10 * std::max(1.0, std::fabs(umax));
  for (std::size_t k = 0; k < u.size(); ++k)
    if (umax - u[k] <= tie_tol) cp.ties.push_back(k);
  cp.tied = cp.ties.size() > 1;
  cp.node = cp.ties.front();
  const auto [i, j] = g.unindex(cp.node);
  const std::size_t im = (i + g.n1 - 1) % g.n1, ip = (i + 1) % g.n1;
  const std::size_t jm = (j + g.n2 - 1) % g.n2, jp = (j + 1) % g.n2;
  auto vertex = [](double fm, double f0, double fp) {
    const double den = fm - 2 * f0 + fp;
    if (!(den < 0)) return 0.0;
    return std::clamp(0.5 * (fm - fp) / den, -0.5, 0.5);
  };
  const double si = cp.tied ? 0.0 : vertex(u[g.index(im, j)], umax, u[g.index(ip, j)]);
  const double sj = cp.tied ? 0.0 : vertex(u[g.index(i, jm)], umax, u[g.index(i, jp)]);
  const Point2 base = g.node(cp.node);
  cp.point = g.wrap({base[0] + si * g.h1, base[1] + sj * g.h2});
  return cp;
}

struct ContinuationStage {
  double epsilon = 0.0;
  Point2 concentration{0, 0};
  double distance = 0.0;      ///< d_g(concentration point, nearest target)
  double peak = 0.0;
  double residual = 0.0;
  double energy = 0.0;
  double gamma_at_peak = 0.0;
  double phi_proxy = 0.0;     ///< ‖u_ε - W_{ε,ξ̂}‖_ε
  SystemResidual system;
  int newton_iterations = 0;
  bool positive = false;
  bool failed = false;
  std::string failure;
  std::vector<double> residual_history;
};

struct ContinuationReport {
  std::vector<ContinuationStage> stages;
  bool distances_non_increasing = true;
  bool complete = true;
  std::vector<Field> solutions;
  std::vector<Field> potentials;
};

struct ContinuationOptions {
  NewtonOptions newton{};
  std::vector<Point2> targets;  ///< critical set used for the distance column (defaults to {ξ*})
  MassCoefficient mass = MassCoefficient::effective;
  bool keep_fields = true;
};

/// For each ε: Newton from W_{ε,ξ̂} with ξ̂ the previous concentration point (ξ* at first).
inline ContinuationReport continuation_run(const ManifoldGrid& g, const ProblemParams& prm,
                                           const RadialProfile& profile,
                                           const std::vector<double>& eps_list, const Point2& xi_star,
                                           const ContinuationOptions& opt = {}) {
  for (std::size_t s = 1; s < eps_list.size(); ++s)
    if (!(eps_list[s] < eps_list[s - 1])) throw ConfigError("continuation: epsilon list must decrease");
  const double h = std::max(g.h1, g.h2);
  for (double e : eps_list)
    if (e < 4 * h * (1 - 1e-12))
      throw ConfigError("continuation: epsilon " + std::to_string(e) +
                        " below the resolution limit 4h = " + std::to_string(4 * h));
  const std::vector<Point2> targets = opt.targets.empty() ? std::vector<Point2>{xi_star} : opt.targets;
  ContinuationReport rep;
  Point2 start = xi_star;
  for (double eps : eps_list) {
    ContinuationStage st;
    st.epsilon = eps;
    try {
      const ProblemParams p = prm.with_epsilon(eps);
      EnergyModel model(g, p);
      AnsatzBuilder builder(g, p, profile, opt.mass);
      const Field u0 = builder.build_W(make_ansatz_spec(g, start, eps));
      NewtonResult nr = newton_solve(model, u0, opt.newton);
      st.residual_history = nr.residual_history;
      st.residual = nr.residual;
      st.newton_iterations = nr.iterations;
      if (nr.trivial) throw ConvergenceError("continuation: converged to the trivial branch", nr.residual_history);
      const auto cp = concentration_point(g, nr.u);
      st.concentration = cp.point;
      st.distance = std::numeric_limits<double>::infinity();
      for (const auto& t : targets) st.distance = std::min(st.distance, geodesic_distance(g, cp.point, t));
      st.peak = nr.u[cp.node];
      st.energy = model.i_energy(nr.u);
      st.gamma_at_peak = gamma_at_node(p, cp.node, 2, opt.mass);
      const Field W = builder.build_W(make_ansatz_spec(g, g.node(cp.node), eps));
      st.phi_proxy = model.space().norm(nr.u - W);
      st.system = system_residual(model, nr.u, nr.psi);
      st.positive = nr.positive;
      if (opt.keep_fields) {
        rep.solutions.push_back(nr.u);
        rep.potentials.push_back(nr.psi);
      }
      start = g.node(cp.node);
    } catch (const std::exception& e) {
      st.failed = true;
      st.failure = e.what();
      rep.complete = false;
      rep.stages.push_back(st);
      break;
    }
    rep.stages.push_back(st);
  }
  for (std::size_t s = 1; s < rep.stages.size(); ++s)
    if (rep.stages[s].distance > rep.stages[s - 1].distance + 1e-6 * h) rep.distances_non_increasing = false;
  return rep;
}

}  // namespace kgmp
