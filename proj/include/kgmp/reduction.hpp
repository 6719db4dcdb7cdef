#pragma once
// Lyapunov–Schmidt reduction: projection onto K⊥, the corrector φ_{ε,ξ}, the reduced energy
// Ĩ_ε(ξ) and the landscape Γ.

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kgmp/ansatz.hpp"
#include "kgmp/common.hpp"
#include "kgmp/energy.hpp"
#include "kgmp/limit_profile.hpp"
#include "kgmp/parallel.hpp"

namespace kgmp {

/// Γ(x) = c^{n/2} a^{p/(p-2) - n/2} / b^{2/(p-2)}
inline double gamma(double a, double b, double c, int n, double p) {
  if (!(a > 0 && b > 0 && c > 0)) throw ConfigError("gamma: a, b, c must be positive");
  const double nh = 0.5 * n;
  return std::pow(c, nh) * std::pow(a, p / (p - 2.0) - nh) / std::pow(b, 2.0 / (p - 2.0));
}

enum class LiftKind { warped, harmonic_morphism };

struct LiftInputs {
  int n = 2;
  double p = 4.0;
  double beta = 1.0;
  double f = 1.0;   ///< warping function value (warped)
  int k = 1;        ///< fiber dimension (warped)
  double mu = 1.0;  ///< μ with μ∘π = λ² (harmonic morphism)
};

/// Warped: f^k β^{p/(p-2)-n/2}. Harmonic morphism: β^{p/(p-2)-n/2} μ^{n/2-1}.
inline double gamma_lifted(LiftKind kind, const LiftInputs& in) {
  const double e = in.p / (in.p - 2.0) - 0.5 * in.n;
  if (!(in.beta > 0)) throw ConfigError("gamma_lifted: beta must be positive");
  if (kind == LiftKind::warped) {
    if (!(in.f > 0)) throw ConfigError("gamma_lifted: f must be positive");
    return std::pow(in.f, in.k) * std::pow(in.beta, e);
  }
  if (!(in.mu > 0)) throw ConfigError("gamma_lifted: mu must be positive");
  return std::pow(in.beta, e) * std::pow(in.mu, 0.5 * in.n - 1.0);
}

/// ⟨·,·⟩_ε-orthogonal projection onto K⊥ = {φ : ⟨φ, Z^i⟩_ε = 0}.
class KernelProjector {
 public:
  KernelProjector(EpsilonSpace& space, Field z1, Field z2)
      : space_(&space), z1_(std::move(z1)), z2_(std::move(z2)) {
    gram_ = gram_from(space, z1_, z2_);
    det_ = gram_[0][0] * gram_[1][1] - gram_[0][1] * gram_[1][0];
    const double scale = gram_[0][0] * gram_[1][1];
    if (!(std::fabs(det_) > 1e-12 * scale))
      throw ConvergenceError("kernel projector: Gram matrix numerically singular",
                             {gram_[0][0], gram_[0][1], gram_[1][1]});
  }

  Field operator()(const Field& phi) const {
    const double r1 = space_->inner(phi, z1_), r2 = space_->inner(phi, z2_);
    const double c1 = (gram_[1][1] * r1 - gram_[0][1] * r2) / det_;
    const double c2 = (-gram_[1][0] * r1 + gram_[0][0] * r2) / det_;
    Field out = phi;
    axpy(-c1, z1_, out);
    axpy(-c2, z2_, out);
    return out;
  }

  const Matrix2& gram() const { return gram_; }
  const Field& z1() const { return z1_; }
  const Field& z2() const { return z2_; }

 private:
  EpsilonSpace* space_;
  Field z1_, z2_;
  Matrix2 gram_{};
  double det_ = 0.0;
};

inline Field project_orthogonal(const ManifoldGrid& g, const ProblemParams& prm,
                                const RadialProfile& profile, const AnsatzSpec& spec,
                                const Field& phi) {
  const ProblemParams p = prm.with_epsilon(spec.epsilon);
  const auto f = AnsatzBuilder(g, p, profile).build(spec);
  EpsilonSpace space(g, p);
  return KernelProjector(space, f.Z1, f.Z2)(phi);
}

struct CorrectorOptions {
  int max_iter = 60;
  double tol = 1e-8;
  double gmres_tol = 1e-10;
  double inner_reduction = 1e-2;  ///< GMRES reduction per fixed-point step
  int gmres_restart = 60;
  int gmres_max_iter = 600;
  int ritz_steps = 0;  ///< > 0 requests a Lanczos estimate of the smallest |eigenvalue| of L on K⊥
  MassCoefficient mass = MassCoefficient::effective;
};

struct CorrectorResult {
  Field phi;
  Field W;
  std::vector<double> norm_history;      ///< ‖φ_n‖_ε per iteration
  std::vector<double> residual_history;  ///< ‖Π⊥(W+φ - i*[...])‖_ε per iteration
  double norm_eps = 0.0;
  double residual = 0.0;
  double orthogonality = 0.0;  ///< max_i |⟨φ, Z^i⟩_ε| / (‖φ‖_ε ‖Z^i‖_ε)
  bool damped = false;
  std::optional<double> ritz_min;
  int iterations = 0;
};

/// Fixed point φ ← L^{-1}(N(φ) + S(φ) + R) on K⊥, where
/// L φ = Π⊥(φ - i*[b f'(W) φ]), N(φ) = Π⊥ i*[b(f(W+φ) - f(W) - f'(W)φ)],
/// S(φ) = ω² Π⊥ i*[b g(W+φ)], R = Π⊥(i*[b f(W)] - W).
class CorrectorSolver {
 public:
  CorrectorSolver(const ManifoldGrid& g, const ProblemParams& prm, const RadialProfile& profile,
                  const AnsatzSpec& spec, CorrectorOptions opt = {})
      : CorrectorSolver(g, prm, profile, spec, nullptr, opt) {}

  /// Same, with `base` in place of W_{ε,ξ} (the kernel fields still come from the ansatz at ξ).
  CorrectorSolver(const ManifoldGrid& g, const ProblemParams& prm, const RadialProfile& profile,
                  const AnsatzSpec& spec, const Field* base, CorrectorOptions opt = {})
      : params_(prm.with_epsilon(spec.epsilon)),
        model_(g, params_),
        builder_(g, params_, profile, opt.mass),
        opt_(opt) {
    const auto f = builder_.build(spec);
    W_ = base ? *base : f.W;
    proj_.emplace(model_.space(), f.Z1, f.Z2);
    const std::size_t n = W_.size();
    fW_ = Field(n);
    bfpW_ = Field(n);
    for (std::size_t k = 0; k < n; ++k) {
      fW_[k] = params_.b[k] * nonlinearity_f(W_[k], params_.p);
      bfpW_[k] = params_.b[k] * nonlinearity_f_prime(W_[k], params_.p);
    }
    Field r = istar(fW_);
    r -= W_;
    R_ = (*proj_)(r);
  }

  const Field& W() const { return W_; }
  EnergyModel& model() { return model_; }
  const KernelProjector& projector() const { return *proj_; }

  Field apply_L(const Field& phi, double istar_tol = 0.0) {
    Field t(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) t[k] = bfpW_[k] * phi[k];
    Field out = phi;
    out -= model_.space().istar(t, nullptr, istar_tol);
    return (*proj_)(out);
  }

  /// N(φ) + S(φ) + R
  Field rhs(const Field& phi) {
    const std::size_t n = phi.size();
    const double w2 = params_.omega * params_.omega;
    Field u = W_ + phi;
    Field psi(n, 0.0);
    if (w2 != 0.0) {
      psi = model_.psi_map().at(u, psi_last_.size() == 0 ? nullptr : &psi_last_).psi();
      psi_last_ = psi;
    }
    Field src(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double b = params_.b[k];
      src[k] = b * nonlinearity_f(u[k], params_.p) - fW_[k] - bfpW_[k] * phi[k] +
               w2 * b * nonlinearity_g(u[k], psi[k], params_.q);
    }
    src_last_ = model_.space().istar(src, src_last_.size() == 0 ? nullptr : &src_last_);
    Field out = (*proj_)(src_last_);
    out += R_;
    return out;
  }

  /// Π⊥(W + φ - i*[b f(W+φ) + ω² b g(W+φ)])
  Field residual(const Field& phi) {
    Field u = W_ + phi;
    Field grad = model_.gradient(u);
    return (*proj_)(grad);
  }

  Field solve_L(const Field& rhs_field, const Field* guess = nullptr, double tol = 0.0) {
    if (tol <= 0.0) tol = opt_.gmres_tol;
    Field x = guess ? *guess : Field(rhs_field.size(), 0.0);
    // matvec accuracy only has to sit below the requested reduction
    const double inner = tol > opt_.gmres_tol ? 1e-5 : 0.0;
    LinearMap a = [this, inner](const Field& v, Field& out) { out = apply_L(v, inner); };
    LinearMap id = [](const Field& v, Field& out) { out = v; };
    auto rep = gmres(a, id, rhs_field, x, tol, opt_.gmres_restart, opt_.gmres_max_iter);
    if (rep.relative_residual > 1e3 * tol)
      throw ConvergenceError("corrector: linear solve on the orthogonal complement stagnated",
                             rep.history);
    return (*proj_)(x);
  }

  /// Smallest |Ritz value| of L on K⊥ in the ⟨·,·⟩_ε geometry.
  double ritz_min(int steps) {
    LinearMap a = [this](const Field& v, Field& out) { out = apply_L(v); };
    InnerProduct ip = [this](const Field& x, const Field& y) { return model_.space().inner(x, y); };
    Field start = (*proj_)(W_);
    LinearMap a2 = [&](const Field& v, Field& out) {
      Field t;
      a(v, t);
      a(t, out);
    };
    const auto [lo, hi] = lanczos_extremes(a2, ip, start, steps);
    (void)hi;
    return std::sqrt(std::max(0.0, lo));
  }

  CorrectorResult solve() {
    CorrectorResult res;
    res.W = W_;
    const std::size_t n = W_.size();
    Field phi(n, 0.0);
    double damping = 1.0;
    int growth = 0;
    double prev_step = std::numeric_limits<double>::infinity();
    Field b = rhs(phi);
    Field r = -1.0 * b;  // Lφ - b at φ = 0
    for (int it = 1; it <= opt_.max_iter; ++it) {
      // correction form: L δ = b - Lφ, solved only to inner_reduction
      Field step = solve_L(-1.0 * r, nullptr, opt_.inner_reduction);
      const double step_norm = model_.space().norm(step);
      if (step_norm > prev_step) {
        ++growth;
        if (damping == 1.0) {
          damping = 0.5;
          res.damped = true;
        }
        if (growth >= 5) {
          res.phi = phi;
          throw ConvergenceError("corrector: contraction failed (norm growth over 5 iterations)",
                                 res.norm_history);
        }
      } else {
        growth = 0;
      }
      prev_step = step_norm;
      axpy(damping, step, phi);
      phi = (*proj_)(phi);
      res.norm_history.push_back(model_.space().norm(phi));
      b = rhs(phi);
      r = apply_L(phi);
      r -= b;  // equals residual(phi)
      const double rn = model_.space().norm(r);
      res.residual_history.push_back(rn);
      res.iterations = it;
      if (rn < opt_.tol) break;
    }
    res.phi = phi;
    res.norm_eps = model_.space().norm(phi);
    res.residual = res.residual_history.empty() ? 0.0 : res.residual_history.back();
    if (!(res.residual < opt_.tol))
      throw ConvergenceError("corrector: tolerance not reached", res.residual_history);
    const double nz1 = model_.space().norm(proj_->z1()), nz2 = model_.space().norm(proj_->z2());
    if (res.norm_eps > 0)
      res.orthogonality =
          std::max(std::fabs(model_.space().inner(phi, proj_->z1())) / (res.norm_eps * nz1),
                   std::fabs(model_.space().inner(phi, proj_->z2())) / (res.norm_eps * nz2));
    if (opt_.ritz_steps > 0) res.ritz_min = ritz_min(opt_.ritz_steps);
    return res;
  }

 private:
  Field istar(const Field& v) { return model_.space().istar(v); }

  ProblemParams params_;
  EnergyModel model_;
  AnsatzBuilder builder_;
  CorrectorOptions opt_;
  Field W_, fW_, bfpW_, R_;
  Field psi_last_, src_last_;  // warm starts
  std::optional<KernelProjector> proj_;
};

inline CorrectorResult solve_corrector(const ManifoldGrid& g, const ProblemParams& prm,
                                       const RadialProfile& profile, const AnsatzSpec& spec,
                                       int max_iter, double tol, CorrectorOptions opt = {}) {
  opt.max_iter = max_iter;
  opt.tol = tol;
  return CorrectorSolver(g, prm, profile, spec, opt).solve();
}

/// Ĩ_ε(ξ) = I_ε(W_{ε,ξ} + φ_{ε,ξ}), or I_ε(W_{ε,ξ}) without the corrector.
inline double reduced_energy(const ManifoldGrid& g, const ProblemParams& prm,
                             const RadialProfile& profile, const AnsatzSpec& spec,
                             bool with_corrector, CorrectorOptions opt = {}) {
  if (with_corrector) {
    CorrectorSolver cs(g, prm, profile, spec, opt);
    const auto r = cs.solve();
    return cs.model().i_energy(r.W + r.phi);
  }
  const ProblemParams p = prm.with_epsilon(spec.epsilon);
  const Field W = AnsatzBuilder(g, p, profile, opt.mass).build_W(spec);
  return EnergyModel(g, p).i_energy(W);
}

/// Γ at node k of the grid. The linear coefficient is d = a - ω²b (effective) or a (bare).
inline double gamma_at_node(const ProblemParams& prm, std::size_t k, int n = 2,
                            MassCoefficient mass = MassCoefficient::effective) {
  const double lin =
      mass == MassCoefficient::effective ? prm.a[k] - prm.omega * prm.omega * prm.b[k] : prm.a[k];
  return gamma(lin, prm.b[k], prm.c[k], n, prm.p);
}

struct LandscapeRow {
  Point2 xi;
  double i_tilde = 0.0;
  double gamma = 0.0;
  double ratio = 0.0;
};

struct LandscapeTable {
  double epsilon = 0.0;
  std::vector<LandscapeRow> rows;
  double fitted_C = 0.0;        ///< mean ratio
  double max_deviation = 0.0;   ///< max |ratio - C_ref| / C_ref (C_ref = fitted_C if none given)
  double reference_C = 0.0;
  std::size_t argmax_i_tilde = 0;
  std::size_t argmax_gamma = 0;
};

struct LandscapeOptions {
  std::size_t xi_per_side = 16;
  bool with_corrector = false;
  std::optional<double> reference_C;
  MassCoefficient mass = MassCoefficient::effective;
  CorrectorOptions corrector{};
};

/// Ĩ_ε and Γ on a uniform ξ-grid snapped to PDE nodes.
inline LandscapeTable landscape_scan(const ManifoldGrid& g, const ProblemParams& prm,
                                     const RadialProfile& profile, double epsilon,
                                     const LandscapeOptions& opt = {}) {
  const std::size_t m = opt.xi_per_side;
  if (m == 0) throw ConfigError("landscape: empty xi grid");
  const ProblemParams p = prm.with_epsilon(epsilon);
  p.validate(g);
  LandscapeTable tab;
  tab.epsilon = epsilon;
  tab.rows.resize(m * m);
  std::vector<std::size_t> node(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const Point2 target{g.period1 * a / m, g.period2 * b / m};
      node[a * m + b] = g.nearest_node(target);
      tab.rows[a * m + b].xi = g.node(node[a * m + b]);
    }
  CorrectorOptions copt = opt.corrector;
  copt.mass = opt.mass;
  parallel_for(m * m, [&](std::size_t lo, std::size_t hi) {
    EnergyModel model(g, p);
    AnsatzBuilder builder(g, p, profile, opt.mass);
    for (std::size_t r = lo; r < hi; ++r) {
      auto& row = tab.rows[r];
      const AnsatzSpec spec = make_ansatz_spec(g, row.xi, epsilon);
      if (opt.with_corrector) {
        CorrectorSolver cs(g, p, profile, spec, copt);
        const auto res = cs.solve();
        row.i_tilde = model.i_energy(res.W + res.phi);
      } else {
        row.i_tilde = model.i_energy(builder.build_W(spec));
      }
      row.gamma = gamma_at_node(p, node[r], 2, opt.mass);
      row.ratio = row.i_tilde / row.gamma;
    }
  });
  double s = 0.0;
  for (const auto& r : tab.rows) s += r.ratio;
  tab.fitted_C = s / static_cast<double>(tab.rows.size());
  tab.reference_C = opt.reference_C.value_or(tab.fitted_C);
  for (std::size_t r = 0; r < tab.rows.size(); ++r) {
    tab.max_deviation = std::max(
        tab.max_deviation, std::fabs(tab.rows[r].ratio - tab.reference_C) / tab.reference_C);
    if (tab.rows[r].i_tilde > tab.rows[tab.argmax_i_tilde].i_tilde) tab.argmax_i_tilde = r;
    if (tab.rows[r].gamma > tab.rows[tab.argmax_gamma].gamma) tab.argmax_gamma = r;
  }
  return tab;
}

inline void write_landscape_csv(std::ostream& os, const LandscapeTable& tab) {
  os << "xi1,xi2,I_tilde,Gamma,ratio\n";
  char buf[160];
  for (const auto& r : tab.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.xi[0], r.xi[1], r.i_tilde,
                  r.gamma, r.ratio);
    os << buf;
  }
}

}  // namespace kgmp
