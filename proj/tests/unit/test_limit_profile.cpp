#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kgmp/limit_profile.hpp"
#include "oracles/frozen_values.hpp"

using namespace kgmp;
namespace frozen = kgmp_oracle::frozen;

namespace {

const RadialProfile& profile(int dim, double p) {
  static const RadialProfile d1p4 = solve_ground_state(1, 4.0), d1p3 = solve_ground_state(1, 3.0),
                             d2p4 = solve_ground_state(2, 4.0), d2p3 = solve_ground_state(2, 3.0),
                             d3p4 = solve_ground_state(3, 4.0);
  if (dim == 1) return p == 4.0 ? d1p4 : d1p3;
  if (dim == 2) return p == 4.0 ? d2p4 : d2p3;
  return d3p4;
}

/// Least-squares slope of log U against r over the last decade of decay.
double tail_slope(const RadialProfile& pr) {
  const double u_end = pr.values.back();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < pr.radii.size(); ++k) {
    if (pr.values[k] > 10 * u_end) continue;
    const double x = pr.radii[k], y = std::log(pr.values[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(GroundState, OneDimensionalCubicSoliton) {
  const auto& pr = profile(1, 4.0);
  EXPECT_NEAR(pr.peak(), std::sqrt(2.0), 1e-8);
  for (double r : {0.5, 1.0, 2.0, 4.0}) EXPECT_NEAR(pr.value(r), std::sqrt(2.0) / std::cosh(r), 1e-8);
}

TEST(GroundState, OneDimensionalQuadraticSoliton) {
  const auto& pr = profile(1, 3.0);
  EXPECT_NEAR(pr.peak(), 1.5, 1e-8);
  for (double r : {0.5, 1.0, 3.0}) {
    const double s = 1.0 / std::cosh(r / 2);
    EXPECT_NEAR(pr.value(r), 1.5 * s * s, 1e-8);
  }
}

TEST(GroundState, TwoDimensionalPeakMatchesShootingOracle) {
  EXPECT_NEAR(profile(2, 4.0).peak(), frozen::dim2_p4.u0, 1e-9);
  EXPECT_NEAR(profile(2, 3.0).peak(), frozen::dim2_p3.u0, 1e-9);
}

TEST(GroundState, ThreeDimensionalPeakMatchesShootingOracle) {
  EXPECT_NEAR(profile(3, 4.0).peak(), frozen::dim3_p4.u0, 1e-8);
}

TEST(GroundState, OdeResidualBelowTolerance) {
  for (int dim : {1, 2, 3}) EXPECT_LT(profile(dim, 4.0).residual, 1e-6) << "dim " << dim;
}

TEST(GroundState, InvariantsPositiveDecreasingDecayed) {
  for (int dim : {1, 2, 3}) {
    const auto& pr = profile(dim, 4.0);
    EXPECT_NEAR(pr.derivative.front(), 0.0, 1e-12);
    EXPECT_LT(pr.values.back(), 1e-8);
    for (std::size_t k = 1; k + 1 < pr.values.size(); ++k) {
      ASSERT_GT(pr.values[k], 0.0);
      ASSERT_LT(pr.values[k], pr.values[k - 1]);
      ASSERT_LT(pr.derivative[k], 0.0);
    }
  }
}

TEST(GroundState, Deterministic) {
  const auto a = solve_ground_state(2, 4.0), b = solve_ground_state(2, 4.0);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.derivative, b.derivative);
}

TEST(GroundState, ExponentialTailSlope) {
  EXPECT_NEAR(tail_slope(profile(1, 4.0)), -1.0, 0.05);
  EXPECT_NEAR(tail_slope(profile(2, 4.0)), -1.0, 0.10);
}

TEST(GroundState, RejectsInvalidInput) {
  EXPECT_THROW(solve_ground_state(4, 4.0), ConfigError);
  EXPECT_THROW(solve_ground_state(2, 2.0), ConfigError);
  EXPECT_THROW(solve_ground_state(3, 6.0), ConfigError);
  EXPECT_THROW(solve_ground_state(2, 4.0, 0.0), ConfigError);
}

TEST(ProfileIntegrals, OneDimensionalSechIntegrals) {
  const auto I = profile_integrals(profile(1, 4.0));
  EXPECT_NEAR(I.int_Up, 16.0 / 3.0, 1e-8);
  EXPECT_NEAR(I.int_U_sq, 4.0, 1e-8);
  EXPECT_NEAR(I.int_gradU_sq, 4.0 / 3.0, 1e-8);
}

TEST(ProfileIntegrals, NehariIdentity) {
  for (auto [dim, p] : {std::pair{1, 3.0}, {1, 4.0}, {2, 3.0}, {2, 4.0}, {3, 4.0}}) {
    const auto I = profile_integrals(profile(dim, p));
    EXPECT_LT(std::fabs(I.int_gradU_sq + I.int_U_sq - I.int_Up) / I.int_Up, 1e-6) << dim << " " << p;
  }
}

TEST(ProfileIntegrals, MatchOracleQuadrature) {
  EXPECT_NEAR(profile_integrals(profile(2, 4.0)).int_Up / frozen::dim2_p4.int_Up, 1.0, 1e-8);
  EXPECT_NEAR(profile_integrals(profile(2, 3.0)).int_Up / frozen::dim2_p3.int_Up, 1.0, 1e-8);
  EXPECT_NEAR(profile_integrals(profile(3, 4.0)).int_Up / frozen::dim3_p4.int_Up, 1.0, 1e-8);
  EXPECT_NEAR(profile_integrals(profile(1, 3.0)).int_Up, frozen::dim1_p3.int_Up, 1e-8);
}

TEST(ProfileIntegrals, KernelModeConstant) {
  const auto [g, m] = kernel_mode_integrals(profile(2, 4.0), ProfileScaling{});
  EXPECT_NEAR(g + m, frozen::gram_diagonal_dim2_p4, 1e-6);
  // ∫(∂₁U)² is half of ∫|∇U|²
  EXPECT_NEAR(m, 0.5 * profile_integrals(profile(2, 4.0)).int_gradU_sq, 1e-10);
}

TEST(ScaledProfile, IdentityScaling) {
  const auto& pr = profile(2, 4.0);
  EXPECT_DOUBLE_EQ(scaled_profile(ProfileScaling{1, 1, 1}, pr, {0, 0}), pr.peak());
}

TEST(ScaledProfile, GammaFromCoefficients) {
  const auto s = ProfileScaling::from_coefficients(4, 1, 1, 4);
  EXPECT_DOUBLE_EQ(s.gamma, 2.0);
  EXPECT_DOUBLE_EQ(s.A, 4.0);
  EXPECT_NEAR(s.gamma, std::pow(s.A / s.B, 1.0 / (4 - 2)), 1e-15);
  EXPECT_DOUBLE_EQ(scaled_profile(s, profile(2, 4.0), {0, 0}), 2 * profile(2, 4.0).peak());
}

TEST(ScaledProfile, ArgumentRescaling) {
  const auto& pr = profile(2, 4.0);
  EXPECT_DOUBLE_EQ(scaled_profile(ProfileScaling{4, 4, 1}, pr, {1, 0}), pr.value(2.0));
  EXPECT_EQ(scaled_profile(ProfileScaling{1, 1, 1}, pr, {pr.truncation_radius + 1, 0}), 0.0);
}

TEST(LinearizedProfile, VanishesAtOrigin) {
  EXPECT_EQ(linearized_profile(ProfileScaling{}, profile(2, 4.0), 1, {0, 0}), 0.0);
  EXPECT_EQ(linearized_profile(ProfileScaling{}, profile(2, 4.0), 2, {0, 0}), 0.0);
}

TEST(LinearizedProfile, OddInFirstCoordinate) {
  const auto& pr = profile(2, 4.0);
  const auto s = ProfileScaling::from_coefficients(2, 1, 1, 4);
  for (double z1 : {0.1, 0.7, 2.3})
    for (double z2 : {-1.0, 0.0, 0.4})
      EXPECT_DOUBLE_EQ(linearized_profile(s, pr, 1, {-z1, z2}), -linearized_profile(s, pr, 1, {z1, z2}));
}

TEST(LinearizedProfile, RejectsBadAxis) {
  EXPECT_THROW(linearized_profile(ProfileScaling{}, profile(2, 4.0), 3, {1, 0}), ConfigError);
}

TEST(LinearizedProfile, SolvesLinearizedEquation) {
  const auto& pr = profile(2, 4.0);
  const double p = 4.0;
  const auto s = ProfileScaling::from_coefficients(2, 1, 1, p);
  const double h = 1e-3;
  double worst = 0.0;
  for (int i = 0; i < 17; ++i)
    for (int j = 0; j < 17; ++j) {
      const Point2 z{-3.0 + 0.37 * i, -3.0 + 0.37 * j};
      auto psi = [&](double a, double b) { return linearized_profile(s, pr, 1, {a, b}); };
      const double lap = (psi(z[0] + h, z[1]) + psi(z[0] - h, z[1]) + psi(z[0], z[1] + h) +
                          psi(z[0], z[1] - h) - 4 * psi(z[0], z[1])) / (h * h);
      const double v = scaled_profile(s, pr, z);
      worst = std::max(worst, std::fabs(-lap + s.A * psi(z[0], z[1]) -
                                        (p - 1) * s.B * std::pow(v, p - 2) * psi(z[0], z[1])));
    }
  EXPECT_LT(worst, 1e-4);
}

TEST(ProfileExport, CsvColumns) {
  std::ostringstream os;
  write_profile_csv(os, profile(1, 4.0));
  std::istringstream is(os.str());
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  EXPECT_EQ(header, "r,U,Uprime");
  EXPECT_EQ(first.substr(0, 2), "0,");
  EXPECT_NEAR(std::stod(first.substr(2)), std::sqrt(2.0), 1e-8);
}
