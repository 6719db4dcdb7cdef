#pragma once
// Peaked ansatz W_{ε,ξ}, kernel fields Z^i_{ε,ξ} and the cutoff χ.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "kgmp/common.hpp"
#include "kgmp/elliptic.hpp"
#include "kgmp/limit_profile.hpp"
#include "kgmp/manifold.hpp"

namespace kgmp {

struct AnsatzSpec {
  Point2 xi{0.0, 0.0};
  double epsilon = 0.1;
  double radius = 1.0;
};

/// Spec at ξ with the grid's ansatz radius; rejects ε > r/4.
inline AnsatzSpec make_ansatz_spec(const ManifoldGrid& g, const Point2& xi, double epsilon) {
  AnsatzSpec s{g.wrap(xi), epsilon, g.ansatz_radius()};
  if (!(epsilon > 0)) throw ConfigError("ansatz: epsilon must be positive");
  if (epsilon > s.radius / 4 * (1 + 1e-12))
    throw ConfigError("ansatz: epsilon " + std::to_string(epsilon) +
                      " exceeds a quarter of the cutoff radius " + std::to_string(s.radius));
  if (!(s.radius < g.injectivity_radius() + 1e-12))
    throw ConfigError("ansatz: cutoff radius beyond the injectivity radius");
  return s;
}

/// Which linear coefficient fixes the local profile V^ξ.
/// effective: d = a - ω²b, the coefficient multiplying u in the single equation.
/// bare: a itself.
enum class MassCoefficient { effective, bare };

inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double e0 = std::exp(-1.0 / t), e1 = std::exp(-1.0 / (1.0 - t));
  return e0 / (e0 + e1);
}

/// χ(y) = 1 on |y| ≤ r/2, 0 on |y| ≥ r, C^∞ in between.
inline double cutoff(double rho, double r) { return smooth_step(2.0 - 2.0 * rho / r); }

/// Normal coordinates of the nodes inside the cutoff ball around ξ.
struct NormalChart {
  std::vector<std::size_t> nodes;
  std::vector<Point2> coords;
};

inline NormalChart normal_chart(const ManifoldGrid& g, const Point2& xi, double radius) {
  NormalChart ch;
  if (g.kind == ManifoldKind::flat_torus) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point2 y = g.chart_delta(xi, g.node(k));
      if (norm2(y) < radius) {
        ch.nodes.push_back(k);
        ch.coords.push_back(y);
      }
    }
    return ch;
  }
  double fmin = 1e300;
  for (std::size_t s = 0; s < 1024; ++s) fmin = std::min(fmin, g.warp->f(g.period1 * s / 1024.0));
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point2 d = g.chart_delta(xi, g.node(k));
    // the metric is bounded below by diag(1, fmin²), so this screen keeps every node within r
    if (std::hypot(d[0], fmin * d[1]) >= radius) continue;
    Point2 y;
    try {
      y = log_map(g, xi, g.node(k));
    } catch (const DomainError&) {
      continue;  // shooting left the injectivity ball, which contains the cutoff ball
    }
    if (norm2(y) < radius) {
      ch.nodes.push_back(k);
      ch.coords.push_back(y);
    }
  }
  return ch;
}

/// Builds W and Z^i at arbitrary ξ for one profile and one coefficient set.
class AnsatzBuilder {
 public:
  AnsatzBuilder(const ManifoldGrid& g, const ProblemParams& prm, const RadialProfile& profile,
                MassCoefficient mass = MassCoefficient::effective)
      : grid_(&g), params_(prm), profile_(&profile), mass_(mass) {
    if (profile.dim != 2) throw ConfigError("ansatz: the profile must be two-dimensional");
    if (std::fabs(profile.exponent_p - prm.p) > 1e-12)
      throw ConfigError("ansatz: profile exponent differs from p");
  }

  /// Local scaling from the coefficients at the node nearest to ξ.
  ProfileScaling scaling_at(const Point2& xi) const {
    const std::size_t k = grid_->nearest_node(xi);
    const double w2 = params_.omega * params_.omega;
    const double lin = mass_ == MassCoefficient::effective ? params_.a[k] - w2 * params_.b[k]
                                                           : params_.a[k];
    return ProfileScaling::from_coefficients(lin, params_.b[k], params_.c[k], params_.p);
  }

  struct Fields {
    Field W, Z1, Z2;
    ProfileScaling scaling;
  };

  Fields build(const AnsatzSpec& spec) const {
    const ManifoldGrid& g = *grid_;
    Fields out{g.zeros(), g.zeros(), g.zeros(), scaling_at(spec.xi)};
    const NormalChart ch = chart(spec);
    for (std::size_t m = 0; m < ch.nodes.size(); ++m) {
      const Point2 y = ch.coords[m];
      const double chi = cutoff(norm2(y), spec.radius);
      if (chi == 0.0) continue;
      const Point2 z{y[0] / spec.epsilon, y[1] / spec.epsilon};
      const std::size_t k = ch.nodes[m];
      out.W[k] = scaled_profile(out.scaling, *profile_, z) * chi;
      out.Z1[k] = linearized_profile(out.scaling, *profile_, 1, z) * chi;
      out.Z2[k] = linearized_profile(out.scaling, *profile_, 2, z) * chi;
    }
    return out;
  }

  Field build_W(const AnsatzSpec& spec) const { return build(spec).W; }
  Field build_Z(const AnsatzSpec& spec, int i) const {
    if (i != 1 && i != 2) throw ConfigError("build_Z: axis index must be 1 or 2");
    auto f = build(spec);
    return i == 1 ? f.Z1 : f.Z2;
  }

  const ManifoldGrid& grid() const { return *grid_; }
  const ProblemParams& params() const { return params_; }
  const RadialProfile& profile() const { return *profile_; }

 private:
  NormalChart chart(const AnsatzSpec& spec) const {
    if (grid_->kind == ManifoldKind::flat_torus) return normal_chart(*grid_, spec.xi, spec.radius);
    // geodesic shooting is costly, so charts on warped grids are cached per ξ
    for (const auto& [xi, ch] : cache_)
      if (xi == spec.xi && ch.first == spec.radius) return ch.second;
    auto ch = normal_chart(*grid_, spec.xi, spec.radius);
    cache_.push_back({spec.xi, {spec.radius, ch}});
    return ch;
  }

  const ManifoldGrid* grid_;
  ProblemParams params_;
  const RadialProfile* profile_;
  MassCoefficient mass_;
  mutable std::vector<std::pair<Point2, std::pair<double, NormalChart>>> cache_;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

inline Matrix2 gram_from(EpsilonSpace& space, const Field& z1, const Field& z2) {
  Matrix2 m{};
  m[0][0] = space.inner(z1, z1);
  m[0][1] = m[1][0] = space.inner(z1, z2);
  m[1][1] = space.inner(z2, z2);
  return m;
}

inline Field build_W(const ManifoldGrid& g, const ProblemParams& prm, const RadialProfile& profile,
                     const AnsatzSpec& spec) {
  return AnsatzBuilder(g, prm, profile).build_W(spec);
}

inline Field build_Z(const ManifoldGrid& g, const ProblemParams& prm, const RadialProfile& profile,
                     const AnsatzSpec& spec, int i) {
  return AnsatzBuilder(g, prm, profile).build_Z(spec, i);
}

inline Matrix2 gram_matrix(const ManifoldGrid& g, const ProblemParams& prm,
                           const RadialProfile& profile, const AnsatzSpec& spec) {
  const auto f = AnsatzBuilder(g, prm.with_epsilon(spec.epsilon), profile).build(spec);
  EpsilonSpace space(g, prm.with_epsilon(spec.epsilon));
  return gram_from(space, f.Z1, f.Z2);
}

}  // namespace kgmp
