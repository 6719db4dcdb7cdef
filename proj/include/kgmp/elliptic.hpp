#pragma once
// Conservative five-point discretization of u ↦ -ε² div_g(c ∇u) + d u on periodic chart grids,
// the ε-weighted inner products and the adjoint operator i*_ε.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kgmp/common.hpp"
#include "kgmp/linalg.hpp"
#include "kgmp/manifold.hpp"

namespace kgmp {

struct ProblemParams {
  Field a, b, c;
  double epsilon = 1.0;
  double q = 1.0;
  double omega = 0.0;
  double p = 4.0;

  /// d = a - ω² b
  Field d() const {
    Field out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - omega * omega * b[k];
    return out;
  }

  void validate(const ManifoldGrid& g) const {
    const std::size_t n = g.size();
    if (a.size() != n || b.size() != n || c.size() != n)
      throw ConfigError("coefficient fields do not match the grid");
    if (!(epsilon > 0)) throw ConfigError("epsilon must be positive");
    if (!(q > 0)) throw ConfigError("q must be positive");
    if (!(p > 2)) throw ConfigError("p must exceed 2");
    for (std::size_t k = 0; k < n; ++k) {
      if (!(b[k] > 0) || !(c[k] > 0)) throw ConfigError("b and c must be positive at every node");
      if (!(a[k] > omega * omega * b[k])) throw ConfigError("a > omega^2 b violated");
    }
  }

  ProblemParams with_epsilon(double eps) const {
    ProblemParams out = *this;
    out.epsilon = eps;
    return out;
  }

  static ProblemParams constant(const ManifoldGrid& g, double a, double b, double c, double eps,
                                double q, double omega, double p) {
    return {g.constant(a), g.constant(b), g.constant(c), eps, q, omega, p};
  }
};

/// Symmetric matrix K with (K u)_k = Σ_faces κ (u_k - u_nb) + mass_k u_k.
/// K is the μ_g-weighted form: K = W·A with W = diag(measure) and A the strong operator.
class DiscreteOperator {
 public:
  const ManifoldGrid* grid = nullptr;
  std::vector<double> east;   ///< coupling between (i,j) and (i+1,j)
  std::vector<double> north;  ///< coupling between (i,j) and (i,j+1)
  std::vector<double> mass;

  std::size_t size() const { return mass.size(); }

  void apply(const Field& u, Field& out) const {
    const std::size_t n1 = grid->n1, n2 = grid->n2;
    if (out.size() != u.size()) out = Field(u.size());
    for (std::size_t i = 0; i < n1; ++i) {
      const std::size_t ip = (i + 1) % n1, im = (i + n1 - 1) % n1;
      for (std::size_t j = 0; j < n2; ++j) {
        const std::size_t jp = (j + 1) % n2, jm = (j + n2 - 1) % n2;
        const std::size_t k = i * n2 + j;
        const std::size_t ke = ip * n2 + j, kw = im * n2 + j, kn = i * n2 + jp, ks = i * n2 + jm;
        const double uk = u[k];
        out[k] = mass[k] * uk + east[k] * (uk - u[ke]) + east[kw] * (uk - u[kw]) +
                 north[k] * (uk - u[kn]) + north[ks] * (uk - u[ks]);
      }
    }
  }

  Field operator()(const Field& u) const {
    Field out(u.size());
    apply(u, out);
    return out;
  }

  /// Strong form A u = W^{-1} K u.
  Field apply_strong(const Field& u) const {
    Field out = (*this)(u);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] /= grid->measure[k];
    return out;
  }

  /// uᵀ K v, summed face by face so that the result is symmetric in (u, v) bit for bit.
  double bilinear(const Field& u, const Field& v) const {
    const std::size_t n1 = grid->n1, n2 = grid->n2;
    double s = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      const std::size_t ip = (i + 1) % n1;
      for (std::size_t j = 0; j < n2; ++j) {
        const std::size_t k = i * n2 + j, ke = ip * n2 + j, kn = i * n2 + (j + 1) % n2;
        s += east[k] * ((u[k] - u[ke]) * (v[k] - v[ke])) +
             north[k] * ((u[k] - u[kn]) * (v[k] - v[kn])) + mass[k] * (u[k] * v[k]);
      }
    }
    return s;
  }

  std::vector<double> diagonal() const {
    const std::size_t n1 = grid->n1, n2 = grid->n2;
    std::vector<double> dg(size());
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) {
        const std::size_t k = i * n2 + j;
        dg[k] = mass[k] + east[k] + east[((i + n1 - 1) % n1) * n2 + j] + north[k] +
                north[i * n2 + (j + n2 - 1) % n2];
      }
    return dg;
  }

  std::unique_ptr<SpectralPreconditioner> spectral_preconditioner() const {
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    return std::make_unique<SpectralPreconditioner>(grid->n1, grid->n2, mean(east), mean(north),
                                                    mean(mass));
  }
};

/// Diffusion part Σ κ (u_k - u_nb) for -div_g(c ∇u), face coefficients from averaged c √g g^{ii}.
inline DiscreteOperator assemble_stiffness(const ManifoldGrid& g, const Field& c) {
  DiscreteOperator op;
  op.grid = &g;
  const std::size_t n1 = g.n1, n2 = g.n2;
  op.east.resize(g.size());
  op.north.resize(g.size());
  op.mass.assign(g.size(), 0.0);
  const double rx = g.h2 / g.h1, ry = g.h1 / g.h2;
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t k = i * n2 + j;
      const std::size_t ke = ((i + 1) % n1) * n2 + j, kn = i * n2 + (j + 1) % n2;
      op.east[k] = rx * 0.5 * (c[k] * g.sqrt_g[k] * g.ginv11[k] + c[ke] * g.sqrt_g[ke] * g.ginv11[ke]);
      op.north[k] = ry * 0.5 * (c[k] * g.sqrt_g[k] * g.ginv22[k] + c[kn] * g.sqrt_g[kn] * g.ginv22[kn]);
    }
  return op;
}

/// scale · stiffness + W · density
inline DiscreteOperator with_mass(const DiscreteOperator& stiff, double scale, const Field& density) {
  DiscreteOperator op;
  op.grid = stiff.grid;
  op.east = stiff.east;
  op.north = stiff.north;
  for (double& x : op.east) x *= scale;
  for (double& x : op.north) x *= scale;
  op.mass.resize(stiff.size());
  for (std::size_t k = 0; k < op.mass.size(); ++k)
    op.mass[k] = scale * stiff.mass[k] + stiff.grid->measure[k] * density[k];
  return op;
}

inline DiscreteOperator assemble_operator(const ManifoldGrid& g, const ProblemParams& prm) {
  prm.validate(g);
  return with_mass(assemble_stiffness(g, prm.c), prm.epsilon * prm.epsilon, prm.d());
}

enum class PreconditionerKind { spectral, jacobi };

/// PCG solver bound to one operator.
class SpdSolver {
 public:
  explicit SpdSolver(DiscreteOperator op, PreconditionerKind kind = PreconditionerKind::spectral,
                     double tol = 1e-10)
      : op_(std::move(op)), tol_(tol) {
    if (kind == PreconditionerKind::spectral) {
      spectral_ = op_.spectral_preconditioner();
    } else {
      inv_diag_ = op_.diagonal();
      for (double& x : inv_diag_) x = 1.0 / x;
    }
    max_iter_ = static_cast<int>(std::min<std::size_t>(10 * op_.size(), 1u << 30));
  }

  const DiscreteOperator& op() const { return op_; }
  const SolveReport& last_report() const { return last_; }

  /// Solves K x = rhs (rhs already in weighted form).
  Field solve(const Field& rhs, const Field* guess = nullptr, double tol = 0.0) {
    Field x = guess ? *guess : Field(rhs.size(), 0.0);
    LinearMap a = [this](const Field& u, Field& out) { op_.apply(u, out); };
    LinearMap m = [this](const Field& r, Field& z) {
      if (spectral_) {
        spectral_->apply(r, z);
      } else {
        if (z.size() != r.size()) z = Field(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) z[k] = inv_diag_[k] * r[k];
      }
    };
    last_ = pcg(a, m, rhs, x, tol > 0.0 ? tol : tol_, max_iter_);
    return x;
  }

 private:
  DiscreteOperator op_;
  double tol_;
  int max_iter_ = 0;
  std::unique_ptr<SpectralPreconditioner> spectral_;
  std::vector<double> inv_diag_;
  SolveReport last_;
};

/// The Hilbert space H_ε on a grid: ⟨u,v⟩_ε = ε^{-2} uᵀ K_ε v with K_ε = ε² K_c + W d.
class EpsilonSpace {
 public:
  EpsilonSpace(const ManifoldGrid& g, const ProblemParams& prm,
               PreconditionerKind kind = PreconditionerKind::spectral)
      : grid_(&g), params_(prm), solver_(assemble_operator(g, prm), kind) {}

  const ManifoldGrid& grid() const { return *grid_; }
  const ProblemParams& params() const { return params_; }
  const DiscreteOperator& op() const { return solver_.op(); }
  SpdSolver& solver() { return solver_; }

  double inner(const Field& u, const Field& v) const {
    return op().bilinear(u, v) / (params_.epsilon * params_.epsilon);
  }
  double norm(const Field& u) const { return std::sqrt(std::max(0.0, inner(u, u))); }

  /// i*_ε(v): the solution of -ε² div_g(c∇u) + d u = v.
  /// tol > 0 overrides the solver tolerance for this call.
  Field istar(const Field& v, const Field* guess = nullptr, double tol = 0.0) {
    Field rhs(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) rhs[k] = grid_->measure[k] * v[k];
    return solver_.solve(rhs, guess, tol);
  }

 private:
  const ManifoldGrid* grid_;
  ProblemParams params_;
  SpdSolver solver_;
};

inline double inner_product_eps(const ManifoldGrid& g, const ProblemParams& prm, const Field& u,
                                const Field& v) {
  return assemble_operator(g, prm).bilinear(u, v) / (prm.epsilon * prm.epsilon);
}

inline double norm_eps(const ManifoldGrid& g, const ProblemParams& prm, const Field& u) {
  return std::sqrt(std::max(0.0, inner_product_eps(g, prm, u, u)));
}

/// |u|_{s,ε} = (ε^{-2} ∫ |u|^s dμ_g)^{1/s}
inline double lebesgue_norm_eps(const ManifoldGrid& g, const Field& u, double s, double epsilon) {
  if (!(s >= 1.0)) throw ConfigError("lebesgue_norm_eps: exponent must be at least 1");
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += g.measure[k] * std::pow(std::fabs(u[k]), s);
  return std::pow(acc / (epsilon * epsilon), 1.0 / s);
}

inline Field adjoint_istar(const ManifoldGrid& g, const ProblemParams& prm, const Field& v) {
  EpsilonSpace space(g, prm);
  return space.istar(v);
}

/// Lanczos estimate of the extreme eigenvalues of the generalized problem K x = λ W x.
inline std::pair<double, double> ritz_extremes(const DiscreteOperator& op, int steps = 60) {
  const ManifoldGrid& g = *op.grid;
  LinearMap a = [&](const Field& x, Field& y) {
    op.apply(x, y);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] /= g.measure[k];
  };
  InnerProduct w = [&](const Field& x, const Field& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += g.measure[k] * x[k] * y[k];
    return s;
  };
  Field start(op.size());
  std::uint64_t state = 0x9E3779B97F4A7C15ULL;
  for (std::size_t k = 0; k < start.size(); ++k) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    start[k] = static_cast<double>(state % 1000003) / 1000003.0 - 0.5;
  }
  return lanczos_extremes(a, w, start, steps);
}

}  // namespace kgmp
