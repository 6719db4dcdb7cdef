#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kgmp/ansatz.hpp"
#include "kgmp/energy.hpp"
#include "kgmp/limit_profile.hpp"

using namespace kgmp;

namespace {

Field random_field(const ManifoldGrid& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Field f(g.size());
  for (auto& x : f) x = d(rng);
  return f;
}

ProblemParams variable_params(const ManifoldGrid& g, double eps, double omega) {
  return {g.sample([](Point2 x) { return 2.0 + 0.5 * std::sin(x[0]) * std::cos(x[1]); }),
          g.sample([](Point2 x) { return 1.0 + 0.3 * std::cos(x[1]); }),
          g.sample([](Point2 x) { return 1.0 + 0.2 * std::sin(x[0] + x[1]); }), eps, 1.0, omega, 4.0};
}

const RadialProfile& ground_state() {
  static const RadialProfile prof = solve_ground_state(2, 4.0);
  return prof;
}

}  // namespace

TEST(Energy, ConstantFieldClosedForms) {
  const auto g = build_flat_torus(2 * pi, 32);
  const Field one = g.constant(1.0);
  const auto plain = ProblemParams::constant(g, 1, 1, 1, 1.0, 1, 0, 4);
  EXPECT_NEAR(j_energy(g, plain, one), pi * pi, 1e-12);
  EXPECT_NEAR(g_energy(g, plain, one), 2 * pi * pi, 1e-12);
  EXPECT_EQ(g_energy(g, plain, g.zeros()), 0.0);
  EXPECT_EQ(i_energy(g, plain, one), j_energy(g, plain, one));
  const auto coupled = ProblemParams::constant(g, 1, 1, 1, 1.0, 1, 0.5, 4);
  EXPECT_NEAR(j_energy(g, coupled, one), 0.5 * pi * pi, 1e-12);
  EXPECT_NEAR(i_energy(g, coupled, one), 0.75 * pi * pi, 1e-12);
}

TEST(Energy, NonPositiveFieldsHaveNoPotential) {
  std::mt19937_64 rng(30);
  const auto g = build_flat_torus(2 * pi, 32);
  const auto prm = variable_params(g, 0.3, 0.0);
  const Field u = random_field(g, rng, -2, 0);
  EXPECT_NEAR(j_energy(g, prm, u), 0.5 * norm_eps(g, prm, u) * norm_eps(g, prm, u), 1e-12 * j_energy(g, prm, u));
}

TEST(Energy, AdditivityExact) {
  std::mt19937_64 rng(31);
  const auto g = build_flat_torus(2 * pi, 32);
  const auto prm = variable_params(g, 0.3, 0.7);
  EnergyModel m(g, prm);
  const Field u = random_field(g, rng, -1, 2);
  EXPECT_EQ(m.i_energy(u), m.j_energy(u) + 0.5 * 0.49 * m.g_energy(u));
}

TEST(Energy, EpsilonHalvingQuadruplesConstantJ) {
  const auto g = build_flat_torus(2 * pi, 32);
  const Field u = g.constant(0.6);
  const auto prm = ProblemParams::constant(g, 1, 1, 1, 0.4, 1, 0, 4);
  EXPECT_NEAR(j_energy(g, prm.with_epsilon(0.2), u) / j_energy(g, prm, u), 4.0, 1e-12);
}

TEST(Energy, CouplingSignStructure) {
  std::mt19937_64 rng(32);
  const auto g = build_flat_torus(2 * pi, 32);
  const auto prm = variable_params(g, 0.3, 0.7);
  EnergyModel m(g, prm);
  for (int s = 0; s < 10; ++s) {
    const Field u = random_field(g, rng, 0, 2);
    const Field psi = m.psi_map()(u);
    for (std::size_t k = 0; k < g.size(); ++k) ASSERT_LE(nonlinearity_g(u[k], psi[k], prm.q), 0.0);
    EXPECT_GE(m.g_energy(u), 0.0);
    EXPECT_GE(m.i_energy(u), m.j_energy(u));
  }
}

TEST(Gradient, ZeroAtZero) {
  const auto g = build_flat_torus(2 * pi, 32);
  EXPECT_EQ(max_abs(i_gradient(g, variable_params(g, 0.3, 0.5), g.zeros())), 0.0);
}

TEST(Gradient, ConstantFieldClosedForm) {
  const auto g = build_flat_torus(2 * pi, 32);
  const double a = 1.5, b = 0.8, q = 1.2, w = 0.6, p = 4, u0 = 1.3;
  const auto prm = ProblemParams::constant(g, a, b, 1, 0.2, q, w, p);
  const double d = a - w * w * b;
  const double psi0 = b * q * u0 * u0 / (b * (1 + q * q * u0 * u0));
  const double expect = (d * u0 + w * w * q * b * psi0 * (2 - q * psi0) * u0 - b * std::pow(u0, p - 1)) / d;
  for (double x : i_gradient(g, prm, g.constant(u0))) ASSERT_NEAR(x, expect, 1e-10);
}

TEST(Gradient, CentralDifferencesOnBothGridKinds) {
  std::mt19937_64 rng(33);
  const auto flat = build_flat_torus(2 * pi, 32);
  const auto warped =
      build_surface_of_revolution({[](double t) { return 2.0 + std::cos(t); }, nullptr, ""}, 32, 32);
  for (const ManifoldGrid* g : {&flat, &warped}) {
    EnergyModel m(*g, variable_params(*g, 0.3, 0.6));
    for (int s = 0; s < 10; ++s) {
      const Field u = random_field(*g, rng, -0.5, 2), phi = random_field(*g, rng, -1, 1);
      const double t = 1e-4;
      Field up = u, um = u;
      axpy(t, phi, up);
      axpy(-t, phi, um);
      const double fd = (m.i_energy(up) - m.i_energy(um)) / (2 * t);
      const double an = m.space().inner(m.gradient(u), phi);
      ASSERT_LT(std::fabs(fd - an) / std::fabs(an), 1e-5);
    }
  }
}

TEST(AnsatzEnergy, ApproachesLimitEnergy) {
  const auto I = profile_integrals(ground_state());
  const double limit = 0.25 * I.int_Up;
  auto rel_error = [&](double eps, std::size_t n) {
    const auto g = build_flat_torus(3.2, n);
    const auto prm = ProblemParams::constant(g, 1, 1, 1, eps, 1, 0, 4);
    const Field W = build_W(g, prm, ground_state(), make_ansatz_spec(g, {1.6, 1.6}, eps));
    return std::fabs(j_energy(g, prm, W) / limit - 1);
  };
  // cutoff truncation dominates at ε = 0.2 and decays with ε
  EXPECT_LT(rel_error(0.1, 1024), 0.1 * rel_error(0.2, 1024));
  for (double eps : {0.1, 0.05}) EXPECT_LT(rel_error(eps, 1024), 2e-3) << "eps " << eps;
  // what remains at the smallest ε is grid error
  EXPECT_LT(rel_error(0.05, 1024), 0.5 * rel_error(0.05, 512));
}

TEST(AnsatzEnergy, CouplingTermDecaysLikeEpsilonPower) {
  const auto g = build_flat_torus(2 * pi, 512);
  std::vector<double> le, lg;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto prm = ProblemParams::constant(g, 1, 1, 1, eps, 1, 0.5, 4);
    const Field W = build_W(g, prm, ground_state(), make_ansatz_spec(g, {pi, pi}, eps));
    le.push_back(std::log(eps));
    lg.push_back(std::log(g_energy(g, prm, W)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < 3; ++i) mx += le[i] / 3, my += lg[i] / 3;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < 3; ++i) sxy += (le[i] - mx) * (lg[i] - my), sxx += (le[i] - mx) * (le[i] - mx);
  EXPECT_GE(sxy / sxx, 0.5);
}
