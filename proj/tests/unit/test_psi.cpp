#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kgmp/psi.hpp"

using namespace kgmp;

namespace {

Field random_field(const ManifoldGrid& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Field f(g.size());
  for (auto& x : f) x = d(rng);
  return f;
}

struct Case {
  ManifoldGrid grid;
  ProblemParams params;
  double lower_tol;
};

std::vector<Case> grid_kinds(double q) {
  std::vector<Case> out;
  auto flat = build_flat_torus(2 * pi, 32);
  auto prm = ProblemParams::constant(flat, 2, 1, 1, 0.2, q, 0.5, 4);
  prm.c = flat.sample([](Point2 x) { return 1.0 + 0.4 * std::cos(x[0]); });
  prm.b = flat.sample([](Point2 x) { return 1.0 + 0.3 * std::sin(x[1]); });
  out.push_back({flat, prm, 1e-9});
  auto warped = build_surface_of_revolution({[](double t) { return 2.0 + std::cos(t); }, nullptr, ""}, 32, 32);
  auto wprm = ProblemParams::constant(warped, 2, 1, 1, 0.2, q, 0.5, 4);
  wprm.c = warped.sample([](Point2 x) { return 1.0 + 0.4 * std::sin(x[0] + x[1]); });
  out.push_back({warped, wprm, 1e-6});
  return out;
}

}  // namespace

TEST(Psi, ZeroSourceGivesZero) {
  const auto g = build_flat_torus(2 * pi, 32);
  const Field psi = compute_psi(g, ProblemParams::constant(g, 1, 1, 1, 0.1, 1, 0, 4), g.zeros());
  EXPECT_EQ(max_abs(psi), 0.0);
}

TEST(Psi, ConstantFieldClosedForms) {
  const auto g = build_flat_torus(2 * pi, 32);
  const Field a = compute_psi(g, ProblemParams::constant(g, 1, 1, 1, 0.1, 2, 0, 4), g.constant(1.0));
  for (double x : a) ASSERT_NEAR(x, 0.4, 1e-12);
  const double u0 = 1.7;
  const Field b = compute_psi(g, ProblemParams::constant(g, 1, 1, 1, 0.1, 1, 0, 4), g.constant(u0));
  for (double x : b) ASSERT_NEAR(x, u0 * u0 / (1 + u0 * u0), 1e-12);
}

TEST(Psi, DerivativeConstantFieldClosedForm) {
  const auto g = build_flat_torus(2 * pi, 32);
  const auto prm = ProblemParams::constant(g, 1, 1, 1, 0.1, 1, 0, 4);
  const Field one = g.constant(1.0);
  for (double x : psi_derivative(g, prm, one, one)) ASSERT_NEAR(x, 0.5, 1e-12);
  EXPECT_EQ(max_abs(psi_derivative(g, prm, one, g.zeros())), 0.0);
}

TEST(Psi, BoundsOnRandomFields) {
  std::mt19937_64 rng(20);
  for (double q : {0.5, 1.0, 3.0}) {
    for (auto& [g, prm, lower_tol] : grid_kinds(q)) {
      PsiMap map(g, prm);
      for (int s = 0; s < 100; ++s) {
        const Field u = random_field(g, rng, -3, 3);
        auto st = map.at(u);
        const Field dpu = st.derivative(u);
        for (std::size_t k = 0; k < g.size(); ++k) {
          ASSERT_GE(st.psi()[k], -lower_tol);
          ASSERT_LT(st.psi()[k], 1 / q);
          ASSERT_GE(dpu[k], -lower_tol);
          ASSERT_LE(dpu[k], 2 / q + 1e-9);
        }
      }
    }
  }
}

TEST(Psi, StrictlyPositiveForNonzeroSource) {
  const auto g = build_flat_torus(2 * pi, 32);
  Field u = g.zeros();
  u[g.index(5, 7)] = 1.0;
  for (double x : compute_psi(g, ProblemParams::constant(g, 1, 1, 1, 0.1, 1, 0, 4), u)) ASSERT_GT(x, 0.0);
}

TEST(Psi, DependsOnlyOnSquare) {
  std::mt19937_64 rng(21);
  for (auto& [g, prm, tol] : grid_kinds(1.0)) {
    const Field u = random_field(g, rng, -2, 2);
    Field au = u;
    for (auto& x : au) x = std::fabs(x);
    EXPECT_LT(max_abs(compute_psi(g, prm, u) - compute_psi(g, prm, au)), 1e-12);
  }
}

TEST(Psi, FrechetRemainderIsQuadratic) {
  std::mt19937_64 rng(22);
  for (auto& [g, prm, tol] : grid_kinds(1.0)) {
    PsiMap map(g, prm);
    const Field u = random_field(g, rng, -1.5, 1.5), h = random_field(g, rng, -1, 1);
    auto st = map.at(u);
    const Field dh = st.derivative(h);
    auto remainder = [&](double t) {
      Field ut = u;
      axpy(t, h, ut);
      Field r = map(ut) - st.psi();
      axpy(-t, dh, r);
      return max_abs(r);
    };
    const double r2 = remainder(1e-2), r3 = remainder(1e-3);
    EXPECT_NEAR(r2 / r3, 100.0, 5.0);
  }
}

TEST(Theta, ConstantFieldClosedForms) {
  const auto g = build_flat_torus(2 * pi, 32);
  const auto prm = ProblemParams::constant(g, 1, 1, 1, 0.1, 1, 0, 4);
  EXPECT_NEAR(theta(g, prm, g.constant(1.0)), pi * pi, 1e-12);
  EXPECT_EQ(theta(g, prm, g.zeros()), 0.0);
}

TEST(Theta, DerivativeCancellationFirstOrder) {
  std::mt19937_64 rng(23);
  for (auto& [g, prm, tol] : grid_kinds(1.0)) {
    const Field u = random_field(g, rng, 0, 2), h = random_field(g, rng, -1, 1);
    const double t0 = theta(g, prm, u), tp = theta_prime(g, prm, u, h);
    auto err = [&](double t) {
      Field ut = u;
      axpy(t, h, ut);
      return std::fabs((theta(g, prm, ut) - t0) / t - tp);
    };
    const double e1 = err(1e-3), e2 = err(5e-4);
    EXPECT_NEAR(e1 / e2, 2.0, 0.1);
    EXPECT_LT(e1, 1e-2 * std::fabs(tp));
  }
}
