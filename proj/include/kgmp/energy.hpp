#pragma once
// Energy functionals J_ε, G_ε, I_ε and the H_ε-gradient of I_ε.

#include <cmath>

#include "kgmp/common.hpp"
#include "kgmp/elliptic.hpp"
#include "kgmp/psi.hpp"

namespace kgmp {

inline double positive_power(double u, double e) { return u > 0.0 ? std::pow(u, e) : 0.0; }

/// f(u) = (u⁺)^{p-1}
inline double nonlinearity_f(double u, double p) { return positive_power(u, p - 1.0); }
inline double nonlinearity_f_prime(double u, double p) {
  return (p - 1.0) * positive_power(u, p - 2.0);
}
/// g(u) = (q²Ψ² - 2qΨ) u
inline double nonlinearity_g(double u, double psi, double q) {
  return (q * q * psi * psi - 2.0 * q * psi) * u;
}

/// Bundles the H_ε space and the Ψ map for one set of coefficients.
class EnergyModel {
 public:
  EnergyModel(const ManifoldGrid& g, const ProblemParams& prm,
              PreconditionerKind kind = PreconditionerKind::spectral)
      : space_(g, prm, kind), psi_(g, prm) {}

  EpsilonSpace& space() { return space_; }
  const PsiMap& psi_map() const { return psi_; }
  const ManifoldGrid& grid() const { return space_.grid(); }
  const ProblemParams& params() const { return space_.params(); }

  double j_energy(const Field& u) const {
    const auto& prm = params();
    const double e2 = prm.epsilon * prm.epsilon;
    double pot = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
      pot += grid().measure[k] * prm.b[k] * positive_power(u[k], prm.p);
    return 0.5 * space_.inner(u, u) - pot / (prm.p * e2);
  }

  double g_energy_from(const Field& u, const Field& psi) const {
    const auto& prm = params();
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
      s += grid().measure[k] * prm.b[k] * psi[k] * u[k] * u[k];
    return prm.q * s / (prm.epsilon * prm.epsilon);
  }

  double g_energy(const Field& u) const { return g_energy_from(u, psi_(u)); }

  double i_energy(const Field& u) const {
    const double w2 = params().omega * params().omega;
    return j_energy(u) + 0.5 * w2 * (w2 == 0.0 ? 0.0 : g_energy(u));
  }

  /// b f(u) + ω² b g(u) with g evaluated at the supplied Ψ(u).
  Field source(const Field& u, const Field& psi) const {
    const auto& prm = params();
    const double w2 = prm.omega * prm.omega;
    Field s(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
      s[k] = prm.b[k] * (nonlinearity_f(u[k], prm.p) + w2 * nonlinearity_g(u[k], psi[k], prm.q));
    return s;
  }

  /// u - i*_ε[b f(u) + ω² b g(u)]
  Field gradient(const Field& u) {
    const Field psi = params().omega == 0.0 ? grid().zeros() : psi_(u);
    return gradient_from(u, psi);
  }

  Field gradient_from(const Field& u, const Field& psi) {
    Field out = space_.istar(source(u, psi));
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = u[k] - out[k];
    return out;
  }

 private:
  EpsilonSpace space_;
  PsiMap psi_;
};

inline double j_energy(const ManifoldGrid& g, const ProblemParams& prm, const Field& u) {
  return EnergyModel(g, prm).j_energy(u);
}
inline double g_energy(const ManifoldGrid& g, const ProblemParams& prm, const Field& u) {
  return EnergyModel(g, prm).g_energy(u);
}
inline double i_energy(const ManifoldGrid& g, const ProblemParams& prm, const Field& u) {
  return EnergyModel(g, prm).i_energy(u);
}
inline Field i_gradient(const ManifoldGrid& g, const ProblemParams& prm, const Field& u) {
  return EnergyModel(g, prm).gradient(u);
}

}  // namespace kgmp
