#pragma once
// Lifting checks: warped products M ×_{f²} S¹ over a flat base, the Hopf fibration S³ → S²(1/2),
// and transport of Γ between the base and the lifted problems.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "kgmp/common.hpp"
#include "kgmp/elliptic.hpp"
#include "kgmp/energy.hpp"
#include "kgmp/manifold.hpp"
#include "kgmp/nonlinear_solver.hpp"
#include "kgmp/reduction.hpp"

namespace kgmp {

/// Base problem -ε²div(f^k∇u) + f^kβu = f^k u^{p-1} + ω²f^k(qv-1)²u,
///              -div(f^k∇v) + f^k(1+q²u²)v = q f^k u²  on a flat torus.
struct WarpedProblem {
  std::function<double(Point2)> f;
  std::function<double(Point2)> beta;
  int k = 1;
  double epsilon = 0.3;
  double q = 1.0;
  double omega = 0.0;
  double p = 4.0;

  /// The same problem in the form a, b, c of the single-manifold system.
  ProblemParams base_params(const ManifoldGrid& g) const {
    ProblemParams prm;
    prm.a = g.sample([&](Point2 x) { return std::pow(f(x), k) * beta(x); });
    prm.b = g.sample([&](Point2 x) { return std::pow(f(x), k); });
    prm.c = prm.b;
    prm.epsilon = epsilon;
    prm.q = q;
    prm.omega = omega;
    prm.p = p;
    return prm;
  }
};

struct PairResidual {
  double u_equation = 0.0;
  double v_equation = 0.0;
  double max() const { return std::max(u_equation, v_equation); }
};

/// Nodal strong residuals (u-equation, v-equation) of the base system, before taking norms.
inline std::pair<Field, Field> warped_base_residual_fields(const ManifoldGrid& g, const WarpedProblem& wp,
                                                           const Field& u, const Field& v) {
  const ProblemParams prm = wp.base_params(g);
  const DiscreteOperator stiff = assemble_stiffness(g, prm.c);
  const Field ku = stiff.apply_strong(u), kv = stiff.apply_strong(v);
  const double e2 = wp.epsilon * wp.epsilon, w2 = wp.omega * wp.omega;
  Field r1(u.size()), r2(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double fk = prm.b[k], t = wp.q * v[k] - 1.0;
    r1[k] = e2 * ku[k] + prm.a[k] * u[k] - fk * positive_power(u[k], wp.p - 1.0) - w2 * fk * t * t * u[k];
    r2[k] = kv[k] + fk * (1.0 + wp.q * wp.q * u[k] * u[k]) * v[k] - wp.q * fk * u[k] * u[k];
  }
  return {r1, r2};
}

/// Sup-norm strong residuals of the base system on the flat base grid.
inline PairResidual warped_base_residual(const ManifoldGrid& g, const WarpedProblem& wp, const Field& u,
                                         const Field& v) {
  const auto [r1, r2] = warped_base_residual_fields(g, wp, u, v);
  return {max_abs(r1), max_abs(r2)};
}

struct LiftReport {
  PairResidual base;     ///< sup |R_base|
  PairResidual lifted;   ///< sup |R_lift| on the product grid
  PairResidual floor;    ///< sup |R_lift - R_base / f^k| (discretization only)
  double fiber_derivative = 0.0;  ///< max |∂_θ| of the lifted fields (exactly 0 by construction)
  std::size_t fiber_nodes = 0;
};

/// Residual of the lifted system -ε²Δ𝔲 + α𝔲 = 𝔲^{p-1} + ω²(q𝔳-1)²𝔲, -Δ𝔳 + (1+q²𝔲²)𝔳 = q𝔲²
/// on the 3D product grid (x, y, θ) with metric dx² + dy² + f(x,y)² dθ² (k = 1 fiber circle),
/// discretized by the conservative scheme with face values of f taken from f itself.
inline LiftReport warped_lift_residual(const ManifoldGrid& g, const WarpedProblem& wp, const Field& u,
                                       const Field& v, std::size_t fiber_nodes = 8) {
  if (g.kind != ManifoldKind::flat_torus) throw ConfigError("lift check: the base must be a flat torus");
  if (wp.k != 1) throw ConfigError("lift check: the product grid realizes a single fiber circle");
  LiftReport rep;
  rep.fiber_nodes = fiber_nodes;
  const auto [rb1, rb2] = warped_base_residual_fields(g, wp, u, v);
  rep.base = {max_abs(rb1), max_abs(rb2)};
  const std::size_t n1 = g.n1, n2 = g.n2, n3 = fiber_nodes;
  const double hx = g.h1, hy = g.h2, ht = 2 * pi / n3;
  const double e2 = wp.epsilon * wp.epsilon, w2 = wp.omega * wp.omega;
  // lifted fields, stored per (i, j, l)
  std::vector<double> U(n1 * n2 * n3), V(n1 * n2 * n3);
  for (std::size_t k = 0; k < n1 * n2; ++k)
    for (std::size_t l = 0; l < n3; ++l) {
      U[k * n3 + l] = u[k];
      V[k * n3 + l] = v[k];
    }
  for (std::size_t k = 0; k < n1 * n2; ++k)
    for (std::size_t l = 0; l < n3; ++l) {
      const std::size_t lp = (l + 1) % n3;
      rep.fiber_derivative = std::max({rep.fiber_derivative, std::fabs(U[k * n3 + lp] - U[k * n3 + l]) / ht,
                                       std::fabs(V[k * n3 + lp] - V[k * n3 + l]) / ht});
    }
  auto div_flux = [&](const std::vector<double>& F, std::size_t i, std::size_t j, std::size_t l) {
    const std::size_t ip = (i + 1) % n1, im = (i + n1 - 1) % n1, jp = (j + 1) % n2, jm = (j + n2 - 1) % n2;
    const std::size_t lp = (l + 1) % n3, lm = (l + n3 - 1) % n3;
    auto at = [&](std::size_t a, std::size_t b, std::size_t c) { return F[(a * n2 + b) * n3 + c]; };
    const double x = i * hx, y = j * hy;
    const double fe = wp.f({x + 0.5 * hx, y}), fw = wp.f({x - 0.5 * hx, y});
    const double fn = wp.f({x, y + 0.5 * hy}), fs = wp.f({x, y - 0.5 * hy});
    const double f0 = wp.f({x, y});
    const double c = at(i, j, l);
    double s = hy * ht / hx * (fe * (c - at(ip, j, l)) + fw * (c - at(im, j, l)));
    s += hx * ht / hy * (fn * (c - at(i, jp, l)) + fs * (c - at(i, jm, l)));
    s += hx * hy / ht / f0 * ((c - at(i, j, lp)) + (c - at(i, j, lm)));
    return s / (hx * hy * ht * f0);  // -Δ_g at the node
  };
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t k = g.index(i, j);
      const Point2 x = g.node(k);
      const double fk = wp.f(x), alpha = wp.beta(x);
      for (std::size_t l = 0; l < n3; ++l) {
        const std::size_t m = k * n3 + l;
        const double t = wp.q * V[m] - 1.0;
        const double r1 = e2 * div_flux(U, i, j, l) + alpha * U[m] - positive_power(U[m], wp.p - 1.0) -
                          w2 * t * t * U[m];
        const double r2 = div_flux(V, i, j, l) + (1.0 + wp.q * wp.q * U[m] * U[m]) * V[m] - wp.q * U[m] * U[m];
        rep.lifted.u_equation = std::max(rep.lifted.u_equation, std::fabs(r1));
        rep.lifted.v_equation = std::max(rep.lifted.v_equation, std::fabs(r2));
        rep.floor.u_equation = std::max(rep.floor.u_equation, std::fabs(r1 - rb1[k] / fk));
        rep.floor.v_equation = std::max(rep.floor.v_equation, std::fabs(r2 - rb2[k] / fk));
      }
    }
  return rep;
}

/// Points of the unit-radius chart on S³: dη² + sin²η dθ₁² + cos²η dθ₂².
struct HopfPoint {
  double eta, theta1, theta2;
};

/// Hopf map to S²(1/2) in polar coordinates: Θ = 2η, Φ = θ₁ - θ₂.
inline std::pair<double, double> hopf_map(const HopfPoint& x) { return {2 * x.eta, x.theta1 - x.theta2}; }

/// Δ on S³ by chart finite differences (conservative in η).
inline double laplacian_s3(const std::function<double(const HopfPoint&)>& F, const HopfPoint& x, double h) {
  auto s = [](double e) { return std::sin(e) * std::cos(e); };
  const double e = x.eta;
  const double f0 = F(x);
  const double fp = F({e + h, x.theta1, x.theta2}), fm = F({e - h, x.theta1, x.theta2});
  double lap = (s(e + 0.5 * h) * (fp - f0) - s(e - 0.5 * h) * (f0 - fm)) / (h * h * s(e));
  const double a = F({e, x.theta1 + h, x.theta2}) - 2 * f0 + F({e, x.theta1 - h, x.theta2});
  const double b = F({e, x.theta1, x.theta2 + h}) - 2 * f0 + F({e, x.theta1, x.theta2 - h});
  lap += a / (h * h * std::sin(e) * std::sin(e)) + b / (h * h * std::cos(e) * std::cos(e));
  return lap;
}

/// Δ on S²(1/2) in polar coordinates (Θ, Φ), metric ¼(dΘ² + sin²Θ dΦ²).
inline double laplacian_s2_half(const std::function<double(double, double)>& u, double th, double ph, double h) {
  const double f0 = u(th, ph);
  double lap = (std::sin(th + 0.5 * h) * (u(th + h, ph) - f0) - std::sin(th - 0.5 * h) * (f0 - u(th - h, ph))) /
               (h * h * std::sin(th));
  lap += (u(th, ph + h) - 2 * f0 + u(th, ph - h)) / (h * h * std::sin(th) * std::sin(th));
  return 4.0 * lap;
}

struct HopfReport {
  double max_error = 0.0;
  std::size_t samples_used = 0;
  std::size_t samples_excluded = 0;
};

/// max over seeded samples of |Δ_{S³}(u∘π) - (Δ_{S²(1/2)}u)∘π|, both by chart differences at h_fd.
inline HopfReport hopf_commutation_error(const std::function<double(double, double)>& u, std::size_t samples,
                                         double h_fd, unsigned seed = 7, double margin = 0.1) {
  HopfReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eta(0.0, 0.5 * pi), ang(0.0, 2 * pi);
  auto lifted = [&](const HopfPoint& x) {
    const auto [th, ph] = hopf_map(x);
    return u(th, ph);
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const HopfPoint x{eta(rng), ang(rng), ang(rng)};
    if (x.eta < margin || x.eta > 0.5 * pi - margin) {
      ++rep.samples_excluded;
      continue;
    }
    const auto [th, ph] = hopf_map(x);
    const double up = laplacian_s3(lifted, x, h_fd);
    const double down = laplacian_s2_half(u, th, ph, h_fd);
    rep.max_error = std::max(rep.max_error, std::fabs(up - down));
    ++rep.samples_used;
  }
  return rep;
}

struct GammaLiftReport {
  std::vector<double> direct;  ///< Γ of the base coefficients
  std::vector<double> lifted;  ///< lifted closed form
  double max_relative_difference = 0.0;
};

/// Warped: Γ(f^kβ, f^k, f^k) against f^kβ^{p/(p-2)-n/2}.
/// Harmonic morphism: Γ(β/μ, 1/μ, 1) against β^{p/(p-2)-n/2}μ^{n/2-1}.
inline GammaLiftReport verify_gamma_lift(LiftKind kind, const std::vector<LiftInputs>& samples) {
  GammaLiftReport rep;
  for (const auto& s : samples) {
    double direct;
    if (kind == LiftKind::warped) {
      const double fk = std::pow(s.f, s.k);
      direct = gamma(fk * s.beta, fk, fk, s.n, s.p);
    } else {
      direct = gamma(s.beta / s.mu, 1.0 / s.mu, 1.0, s.n, s.p);
    }
    const double lifted = gamma_lifted(kind, s);
    rep.direct.push_back(direct);
    rep.lifted.push_back(lifted);
    rep.max_relative_difference = std::max(rep.max_relative_difference, std::fabs(direct - lifted) / std::fabs(lifted));
  }
  return rep;
}

}  // namespace kgmp
