#pragma once
// Periodic chart grids for the two model closed surfaces: the flat torus and
// surfaces of revolution dt² + f(t)² dφ² (the warped product M ×_{f²} S¹ with M = S¹).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "kgmp/common.hpp"

namespace kgmp {

enum class ManifoldKind { flat_torus, surface_of_revolution };

/// Warping function f(t) of a surface of revolution, periodic in t.
struct WarpFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::string description;
};

struct GridIndex {
  std::size_t i = 0;
  std::size_t j = 0;
};

class ManifoldGrid {
 public:
  ManifoldKind kind = ManifoldKind::flat_torus;
  std::size_t n1 = 0, n2 = 0;         ///< nodes along the two chart directions
  double period1 = 0.0, period2 = 0.0;
  double h1 = 0.0, h2 = 0.0;
  // diagonal metric data per node (both model surfaces have g12 = 0 in their chart)
  std::vector<double> g11, g22, ginv11, ginv22, sqrt_g;
  std::vector<double> weight;   ///< chart quadrature weight h1*h2
  std::vector<double> measure;  ///< weight * sqrt_g, the discrete dμ_g
  std::optional<WarpFunction> warp;

  std::size_t size() const noexcept { return n1 * n2; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * n2 + j; }
  GridIndex unindex(std::size_t k) const noexcept { return {k / n2, k % n2}; }
  Point2 node(std::size_t k) const noexcept {
    const auto [i, j] = unindex(k);
    return {i * h1, j * h2};
  }

  Field zeros() const { return Field(size(), 0.0); }
  Field constant(double v) const { return Field(size(), v); }
  template <class Fn>
  Field sample(Fn&& fn) const {
    Field out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = fn(node(k));
    return out;
  }

  double area() const {
    double s = 0.0;
    for (double m : measure) s += m;
    return s;
  }

  /// ∫ u dμ_g by the nodal quadrature.
  double integrate(const Field& u) const {
    double s = 0.0;
    for (std::size_t k = 0; k < size(); ++k) s += measure[k] * u[k];
    return s;
  }

  double warp_at(double t) const { return warp ? warp->f(t) : 1.0; }

  Point2 wrap(const Point2& x) const {
    auto w = [](double v, double per) {
      double r = std::fmod(v, per);
      if (r < 0) r += per;
      if (r >= per) r -= per;
      return r;
    };
    return {w(x[0], period1), w(x[1], period2)};
  }

  /// Shortest chart displacement from a to b, componentwise modulo the periods.
  Point2 chart_delta(const Point2& a, const Point2& b) const {
    auto d = [](double v, double per) { return v - per * std::round(v / per); };
    return {d(b[0] - a[0], period1), d(b[1] - a[1], period2)};
  }

  std::size_t nearest_node(const Point2& x) const {
    const Point2 w = wrap(x);
    const std::size_t i = static_cast<std::size_t>(std::llround(w[0] / h1)) % n1;
    const std::size_t j = static_cast<std::size_t>(std::llround(w[1] / h2)) % n2;
    return index(i, j);
  }

  /// Bilinear periodic interpolation of a nodal field.
  double interpolate(const Field& u, const Point2& x) const {
    const Point2 w = wrap(x);
    const double s = w[0] / h1, t = w[1] / h2;
    const std::size_t i0 = static_cast<std::size_t>(std::floor(s)) % n1;
    const std::size_t j0 = static_cast<std::size_t>(std::floor(t)) % n2;
    const std::size_t i1 = (i0 + 1) % n1, j1 = (j0 + 1) % n2;
    const double fs = s - std::floor(s), ft = t - std::floor(t);
    return (1 - fs) * (1 - ft) * u[index(i0, j0)] + fs * (1 - ft) * u[index(i1, j0)] +
           (1 - fs) * ft * u[index(i0, j1)] + fs * ft * u[index(i1, j1)];
  }

  /// Conservative lower estimate of the injectivity radius.
  double injectivity_radius() const {
    if (kind == ManifoldKind::flat_torus) return 0.5 * std::min(period1, period2);
    double fmin = std::numeric_limits<double>::infinity(), kmax = 0.0;
    const std::size_t samples = 4096;
    for (std::size_t s = 0; s < samples; ++s) {
      const double t = period1 * s / samples;
      const double f = warp->f(t);
      fmin = std::min(fmin, f);
      const double d = 1e-4;
      const double fpp = (warp->f(t + d) - 2 * f + warp->f(t - d)) / (d * d);
      kmax = std::max(kmax, -fpp / f);  // Gaussian curvature -f''/f
    }
    double r = 0.5 * std::min(period1, period2 * fmin);
    if (kmax > 0) r = std::min(r, pi / std::sqrt(kmax));
    return r;
  }

  /// Cutoff radius used by the peaked ansatz.
  double ansatz_radius() const {
    if (kind == ManifoldKind::flat_torus) return std::min(std::min(period1, period2), 2 * pi) / 4;
    double fmin = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < 4096; ++s) fmin = std::min(fmin, warp->f(period1 * s / 4096.0));
    return 0.25 * std::min(period1, period2 * fmin);
  }
};

inline ManifoldGrid build_flat_torus(double side, std::size_t n) {
  if (!(side > 0.0)) throw ConfigError("flat torus: side length must be positive");
  if (n < 16) throw ConfigError("flat torus: at least 16 nodes per side required");
  ManifoldGrid g;
  g.kind = ManifoldKind::flat_torus;
  g.n1 = g.n2 = n;
  g.period1 = g.period2 = side;
  g.h1 = g.h2 = side / n;
  const std::size_t m = n * n;
  g.g11.assign(m, 1.0);
  g.g22.assign(m, 1.0);
  g.ginv11.assign(m, 1.0);
  g.ginv22.assign(m, 1.0);
  g.sqrt_g.assign(m, 1.0);
  g.weight.assign(m, g.h1 * g.h2);
  g.measure = g.weight;
  return g;
}

/// Chart (t, φ) ∈ [0, t_period) × [0, 2π) with metric diag(1, f(t)²).
inline ManifoldGrid build_surface_of_revolution(WarpFunction warp, std::size_t n_t,
                                                std::size_t n_phi, double t_period = 2 * pi) {
  if (n_t < 16 || n_phi < 16) throw ConfigError("surface of revolution: at least 16 nodes per direction");
  if (!warp.f) throw ConfigError("surface of revolution: missing warping function");
  if (!warp.df) {
    auto f = warp.f;
    warp.df = [f](double t) { return (f(t + 1e-6) - f(t - 1e-6)) / 2e-6; };
  }
  for (std::size_t s = 0; s < 8 * n_t; ++s) {
    const double t = t_period * s / (8.0 * n_t);
    if (!(warp.f(t) > 0.0)) throw ConfigError("surface of revolution: warping function must be positive");
  }
  ManifoldGrid g;
  g.kind = ManifoldKind::surface_of_revolution;
  g.n1 = n_t;
  g.n2 = n_phi;
  g.period1 = t_period;
  g.period2 = 2 * pi;
  g.h1 = t_period / n_t;
  g.h2 = 2 * pi / n_phi;
  const std::size_t m = n_t * n_phi;
  g.g11.resize(m);
  g.g22.resize(m);
  g.ginv11.resize(m);
  g.ginv22.resize(m);
  g.sqrt_g.resize(m);
  g.weight.assign(m, g.h1 * g.h2);
  g.measure.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double f = warp.f(g.node(k)[0]);
    g.g11[k] = 1.0;
    g.g22[k] = f * f;
    g.ginv11[k] = 1.0;
    g.ginv22[k] = 1.0 / (f * f);
    g.sqrt_g[k] = f;
    g.measure[k] = g.weight[k] * f;
  }
  g.warp = std::move(warp);
  return g;
}

namespace detail {

// Geodesic flow of dt² + f(t)²dφ² integrated over unit parameter time.
inline Point2 integrate_geodesic(const WarpFunction& w, Point2 x, Point2 v) {
  const double speed = std::hypot(v[0], w.f(x[0]) * v[1]);
  const int steps = std::max(32, static_cast<int>(std::ceil(400 * speed)));
  const double h = 1.0 / steps;
  auto rhs = [&](const std::array<double, 4>& s) {
    const double f = w.f(s[0]), df = w.df(s[0]);
    return std::array<double, 4>{s[2], s[3], f * df * s[3] * s[3], -2.0 * df / f * s[2] * s[3]};
  };
  std::array<double, 4> s{x[0], x[1], v[0], v[1]};
  for (int k = 0; k < steps; ++k) {
    auto add = [](std::array<double, 4> a, const std::array<double, 4>& b, double c) {
      for (int i = 0; i < 4; ++i) a[i] += c * b[i];
      return a;
    };
    const auto k1 = rhs(s);
    const auto k2 = rhs(add(s, k1, 0.5 * h));
    const auto k3 = rhs(add(s, k2, 0.5 * h));
    const auto k4 = rhs(add(s, k3, h));
    for (int i = 0; i < 4; ++i) s[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return {s[0], s[1]};
}

}  // namespace detail

/// exp_ξ(y), with y expressed in the orthonormal frame (∂₁, ∂₂/√g₂₂) at ξ.
inline Point2 exp_map(const ManifoldGrid& g, const Point2& xi, const Point2& y) {
  if (!(norm2(y) < g.injectivity_radius()))
    throw DomainError("exp_map: tangent vector beyond the injectivity radius");
  if (g.kind == ManifoldKind::flat_torus) return g.wrap({xi[0] + y[0], xi[1] + y[1]});
  const double f0 = g.warp->f(xi[0]);
  return g.wrap(detail::integrate_geodesic(*g.warp, xi, {y[0], y[1] / f0}));
}

/// exp_ξ^{-1}(x) for x within the injectivity radius; Newton on the shooting map
/// for surfaces of revolution.
inline Point2 log_map(const ManifoldGrid& g, const Point2& xi, const Point2& x) {
  const Point2 d = g.chart_delta(xi, x);
  if (g.kind == ManifoldKind::flat_torus) return d;
  const double f0 = g.warp->f(xi[0]);
  Point2 y{d[0], 0.5 * (f0 + g.warp->f(xi[0] + d[0])) * d[1]};
  const double rinj = g.injectivity_radius();
  auto miss = [&](const Point2& yy) {
    const Point2 e = detail::integrate_geodesic(*g.warp, xi, {yy[0], yy[1] / f0});
    return g.chart_delta(x, e);
  };
  for (int it = 0; it < 30; ++it) {
    const Point2 r = miss(y);
    if (std::hypot(r[0], r[1]) < 1e-12) break;
    const double s = 1e-7;
    const Point2 ra = miss({y[0] + s, y[1]}), rb = miss({y[0], y[1] + s});
    const double j11 = (ra[0] - r[0]) / s, j21 = (ra[1] - r[1]) / s;
    const double j12 = (rb[0] - r[0]) / s, j22 = (rb[1] - r[1]) / s;
    const double det = j11 * j22 - j12 * j21;
    if (std::fabs(det) < 1e-14) throw DomainError("log_map: singular shooting Jacobian");
    y[0] -= (j22 * r[0] - j12 * r[1]) / det;
    y[1] -= (-j21 * r[0] + j11 * r[1]) / det;
    if (norm2(y) > rinj) throw DomainError("log_map: point beyond the injectivity radius");
  }
  return y;
}

namespace detail {

inline double segment_length(const ManifoldGrid& g, const Point2& a, int di, int dj) {
  const double dt = di * g.h1, dphi = dj * g.h2;
  if (g.kind == ManifoldKind::flat_torus) return std::hypot(dt, dphi);
  // Simpson along the chart-straight segment
  double s = 0.0;
  const double wts[3] = {1.0, 4.0, 1.0};
  for (int k = 0; k < 3; ++k) {
    const double f = g.warp->f(a[0] + 0.5 * k * dt);
    s += wts[k] * std::hypot(dt, f * dphi);
  }
  return s / 6.0;
}

}  // namespace detail

/// Geodesic distance. Exact on the flat torus; Dijkstra on the 16-neighbour node
/// graph (endpoints snapped to nodes) on surfaces of revolution.
inline double geodesic_distance(const ManifoldGrid& g, const Point2& x, const Point2& xi) {
  if (g.kind == ManifoldKind::flat_torus) return norm2(g.chart_delta(xi, x));
  const std::size_t src = g.nearest_node(x), dst = g.nearest_node(xi);
  if (src == dst) return 0.0;
  static constexpr int moves[16][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1}, {1, 1},   {1, -1},
                                       {-1, 1}, {-1, -1}, {2, 1}, {2, -1}, {-2, 1}, {-2, -1},
                                       {1, 2},  {1, -2}, {-1, 2}, {-1, -2}};
  std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    const auto [d, k] = pq.top();
    pq.pop();
    if (d > dist[k]) continue;
    if (k == dst) return d;
    const auto [i, j] = g.unindex(k);
    const Point2 a = g.node(k);
    for (const auto& mv : moves) {
      const std::size_t ni = (i + g.n1 + mv[0]) % g.n1, nj = (j + g.n2 + mv[1]) % g.n2;
      const std::size_t nk = g.index(ni, nj);
      const double nd = d + detail::segment_length(g, a, mv[0], mv[1]);
      if (nd < dist[nk]) {
        dist[nk] = nd;
        pq.push({nd, nk});
      }
    }
  }
  return dist[dst];
}

}  // namespace kgmp
