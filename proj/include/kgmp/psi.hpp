#pragma once
// The map u ↦ Ψ(u) solving -div_g(c∇Ψ) + b(1+q²u²)Ψ = b q u², its derivative and Θ.

#include <memory>

#include "kgmp/common.hpp"
#include "kgmp/elliptic.hpp"
#include "kgmp/manifold.hpp"

namespace kgmp {

/// Ψ evaluated at one u, keeping the factorized-free solver so that Ψ'(u)[h] is cheap to repeat.
class PsiState {
 public:
  PsiState(const DiscreteOperator& stiffness, const ProblemParams& prm, const Field& u,
           const Field* guess = nullptr)
      : u_(u), q_(prm.q), b_(prm.b) {
    const ManifoldGrid& g = *stiffness.grid;
    Field density(u.size()), rhs(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      density[k] = prm.b[k] * (1.0 + q_ * q_ * u[k] * u[k]);
      rhs[k] = g.measure[k] * prm.b[k] * q_ * u[k] * u[k];
    }
    solver_ = std::make_unique<SpdSolver>(with_mass(stiffness, 1.0, density));
    psi_ = solver_->solve(rhs, guess);
  }

  const Field& u() const { return u_; }
  const Field& psi() const { return psi_; }

  /// Ψ'(u)[h]: -div_g(c∇V) + b(1+q²u²)V = 2bqu(1-qΨ)h
  Field derivative(const Field& h) {
    const ManifoldGrid& g = *solver_->op().grid;
    Field rhs(h.size());
    for (std::size_t k = 0; k < h.size(); ++k)
      rhs[k] = g.measure[k] * 2.0 * b_[k] * q_ * u_[k] * (1.0 - q_ * psi_[k]) * h[k];
    return solver_->solve(rhs);
  }

 private:
  Field u_;
  double q_;
  Field b_;
  std::unique_ptr<SpdSolver> solver_;
  Field psi_;
};

/// Reusable Ψ map for fixed coefficients.
class PsiMap {
 public:
  PsiMap(const ManifoldGrid& g, const ProblemParams& prm)
      : grid_(&g), params_(prm), stiffness_(assemble_stiffness(g, prm.c)) {}

  PsiState at(const Field& u, const Field* guess = nullptr) const {
    return PsiState(stiffness_, params_, u, guess);
  }
  Field operator()(const Field& u) const { return at(u).psi(); }

  const ManifoldGrid& grid() const { return *grid_; }
  const ProblemParams& params() const { return params_; }
  const DiscreteOperator& stiffness() const { return stiffness_; }

 private:
  const ManifoldGrid* grid_;
  ProblemParams params_;
  DiscreteOperator stiffness_;
};

inline Field compute_psi(const ManifoldGrid& g, const ProblemParams& prm, const Field& u) {
  return PsiMap(g, prm)(u);
}

inline Field psi_derivative(const ManifoldGrid& g, const ProblemParams& prm, const Field& u,
                            const Field& h) {
  return PsiMap(g, prm).at(u).derivative(h);
}

/// Θ(u) = ½ ∫ b (1 - qΨ(u)) u² dμ_g
inline double theta_from(const ManifoldGrid& g, const ProblemParams& prm, const Field& u,
                         const Field& psi) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    s += g.measure[k] * prm.b[k] * (1.0 - prm.q * psi[k]) * u[k] * u[k];
  return 0.5 * s;
}

/// Θ'(u)[h] = ∫ b (1 - qΨ(u))² u h dμ_g
inline double theta_prime_from(const ManifoldGrid& g, const ProblemParams& prm, const Field& u,
                               const Field& psi, const Field& h) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double w = 1.0 - prm.q * psi[k];
    s += g.measure[k] * prm.b[k] * w * w * u[k] * h[k];
  }
  return s;
}

inline double theta(const ManifoldGrid& g, const ProblemParams& prm, const Field& u) {
  return theta_from(g, prm, u, compute_psi(g, prm, u));
}

inline double theta_prime(const ManifoldGrid& g, const ProblemParams& prm, const Field& u,
                          const Field& h) {
  return theta_prime_from(g, prm, u, compute_psi(g, prm, u), h);
}

}  // namespace kgmp
