#pragma once
// Radial ground state of -ΔU + U = U^{p-1} on R^n and the scaled / linearized
// profiles built from it.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "kgmp/common.hpp"

namespace kgmp {

/// Sampled ground state on a uniform radial grid [0, truncation_radius].
struct RadialProfile {
  int dim = 2;
  double exponent_p = 4.0;
  double step = 1e-3;
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> derivative;
  double truncation_radius = 20.0;
  double residual = 0.0;  ///< sup-norm ODE residual measured on the samples

  double peak() const { return values.front(); }

  /// U''(r_k) from the ODE itself.
  double second_derivative_at(std::size_t k) const {
    const double u = values[k];
    const double nl = u > 0.0 ? std::pow(u, exponent_p - 1.0) : 0.0;
    if (k == 0) return (u - nl) / dim;
    return -(dim - 1) / radii[k] * derivative[k] + u - nl;
  }

  /// U(r), cubic Hermite on (U, U'); zero beyond the truncation radius.
  double value(double r) const {
    r = std::fabs(r);
    if (r >= truncation_radius) return 0.0;
    return hermite(r, values, derivative, /*use_second=*/false);
  }

  /// U'(r), cubic Hermite on (U', U'').
  double slope(double r) const {
    r = std::fabs(r);
    if (r >= truncation_radius) return 0.0;
    return hermite(r, derivative, derivative, /*use_second=*/true);
  }

 private:
  double hermite(double r, const std::vector<double>& f, const std::vector<double>& df,
                 bool use_second) const {
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(r / step), radii.size() - 2);
    const double t = (r - radii[k]) / step;
    const double f0 = f[k], f1 = f[k + 1];
    const double d0 = (use_second ? second_derivative_at(k) : df[k]) * step;
    const double d1 = (use_second ? second_derivative_at(k + 1) : df[k + 1]) * step;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * f1 +
           (t3 - t2) * d1;
  }
};

/// Coefficients of the frozen limit problem -cΔV + aV = bV^{p-1} at a point.
struct ProfileScaling {
  double A = 1.0;
  double B = 1.0;
  double gamma = 1.0;

  static ProfileScaling from_coefficients(double a, double b, double c, double p) {
    if (!(a > 0 && b > 0 && c > 0)) throw ConfigError("profile scaling needs a, b, c > 0");
    return {a / c, b / c, std::pow(a / b, 1.0 / (p - 2.0))};
  }
};

struct ProfileIntegrals {
  double int_Up = 0.0;
  double int_gradU_sq = 0.0;
  double int_U_sq = 0.0;
};

namespace detail {

struct ShootState {
  std::vector<double> u, up;
  int fate = 0;  // +1: crossed zero, -1: turned upward, 0: neither before r_end
};

inline ShootState shoot(int dim, double p, double u0, double dr, double r_end) {
  const std::size_t n_steps = static_cast<std::size_t>(std::llround(r_end / dr));
  ShootState s;
  s.u.reserve(n_steps + 1);
  s.up.reserve(n_steps + 1);
  s.u.push_back(u0);
  s.up.push_back(0.0);

  auto accel = [&](double r, double u, double up) {
    const double nl = std::pow(std::fabs(u), p - 2.0) * u;
    return -(dim - 1) / r * up + u - nl;
  };
  auto rk4 = [&](double r, double h, double& u, double& up) {
    const double k1u = up, k1v = accel(r, u, up);
    const double k2u = up + 0.5 * h * k1v, k2v = accel(r + 0.5 * h, u + 0.5 * h * k1u, k2u);
    const double k3u = up + 0.5 * h * k2v, k3v = accel(r + 0.5 * h, u + 0.5 * h * k2u, k3u);
    const double k4u = up + h * k3v, k4v = accel(r + h, u + h * k3u, k4u);
    u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    up += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  };

  // series start away from the coordinate singularity
  const double r0 = 1e-6;
  const double curv = u0 * (1.0 - std::pow(u0, p - 2.0)) / dim;  // U''(0)
  double u = u0 + 0.5 * curv * r0 * r0;
  double up = curv * r0;
  // first partial step to the first sample, split to keep RK4 accuracy near r = 0
  {
    double r = r0;
    const int sub = 1000;
    const double h = (dr - r0) / sub;
    for (int i = 0; i < sub; ++i, r += h) rk4(r, h, u, up);
  }
  for (std::size_t k = 1;; ++k) {
    if (u < 0.0) { s.fate = +1; break; }
    if (up > 0.0) { s.fate = -1; break; }
    s.u.push_back(u);
    s.up.push_back(up);
    if (k >= n_steps) break;
    // the (n-1)/r coefficient is stiff near the origin: sub-step there
    const int sub = k < 64 ? 64 : 1;
    for (int i = 0; i < sub; ++i) rk4(k * dr + i * dr / sub, dr / sub, u, up);
  }
  return s;
}

// Decaying solution of the linearized equation -T'' - (n-1)/r T' + T = 0.
inline std::pair<double, double> decaying_mode(int dim, double r) {
  switch (dim) {
    case 1: return {std::exp(-r), -std::exp(-r)};
    case 2: return {std::cyl_bessel_k(0.0, r), -std::cyl_bessel_k(1.0, r)};
    default: {
      const double e = std::exp(-r);
      return {e / r, -e * (1.0 / r + 1.0 / (r * r))};
    }
  }
}

inline double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;  // number of intervals, even by construction
  double s = f.front() + f[n];
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

inline double radial_measure(int dim, double r) {
  if (dim == 1) return 2.0;
  if (dim == 2) return 2.0 * pi * r;
  return 4.0 * pi * r * r;
}

}  // namespace detail

/// Shooting on U(0) with RK4 on a uniform grid; the tail past the point where
/// the bracketing trajectories separate is continued with the decaying linear mode.
inline RadialProfile solve_ground_state(int dim, double p, double tol = 1e-6) {
  if (dim < 1 || dim > 3) throw ConfigError("ground state: dim must be 1, 2 or 3");
  if (!(p > 2.0)) throw ConfigError("ground state: exponent p must exceed 2");
  if (dim == 3 && !(p < 6.0)) throw ConfigError("ground state: dim = 3 requires p < 6");
  if (!(tol > 0.0)) throw ConfigError("ground state: tol must be positive");

  constexpr double dr = 1e-3;
  constexpr double r_shoot = 40.0;

  double lo = 1.0, hi = 2.0;
  for (int i = 0; i < 60 && detail::shoot(dim, p, hi, dr, r_shoot).fate != +1; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  if (detail::shoot(dim, p, hi, dr, r_shoot).fate != +1)
    throw ConvergenceError("ground state: no overshooting U(0) found", {lo, hi});

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int fate = detail::shoot(dim, p, mid, dr, r_shoot).fate;
    if (fate == +1) hi = mid;
    else if (fate == -1) lo = mid;
    else { lo = hi = mid; break; }
  }

  const auto below = detail::shoot(dim, p, lo, dr, r_shoot);
  const auto above = detail::shoot(dim, p, hi, dr, r_shoot);
  // last sample where the two bracketing trajectories still agree to 1e-6 relative
  std::size_t match = 1;
  const std::size_t common = std::min(below.u.size(), above.u.size());
  for (std::size_t k = 1; k < common; ++k) {
    const double ul = below.u[k], uh = above.u[k];
    if (std::fabs(ul - uh) > 1e-6 * std::fabs(ul) || below.up[k] >= 0.0) break;
    match = k;
  }
  if (match < 100)
    throw ConvergenceError("ground state: bracket does not enclose a decaying solution", {lo, hi});

  RadialProfile prof;
  prof.dim = dim;
  prof.exponent_p = p;
  prof.step = dr;

  double r_max = 20.0;
  const auto tail_at = [&](double r) {
    const double um = 0.5 * (below.u[match] + above.u[match]);
    const auto [tm, dtm] = detail::decaying_mode(dim, match * dr);
    const auto [t, dt] = detail::decaying_mode(dim, r);
    return std::pair{um * t / tm, um * dt / tm};
  };
  // extend the truncation radius (in unit steps) until the tail is below 1e-8
  while (match * dr < r_max && tail_at(r_max).first >= 1e-8) r_max += 1.0;
  prof.truncation_radius = std::max(r_max, std::ceil(match * dr));

  const std::size_t n = static_cast<std::size_t>(std::llround(prof.truncation_radius / dr));
  prof.radii.resize(n + 1);
  prof.values.resize(n + 1);
  prof.derivative.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double r = k * dr;
    prof.radii[k] = r;
    if (k <= match) {
      prof.values[k] = 0.5 * (below.u[k] + above.u[k]);
      prof.derivative[k] = 0.5 * (below.up[k] + above.up[k]);
    } else {
      std::tie(prof.values[k], prof.derivative[k]) = tail_at(r);
    }
  }
  prof.derivative[0] = 0.0;

  // residual with U'' from a fourth-order difference of the stored U'
  double res = 0.0;
  for (std::size_t k = 2; k + 2 <= n; ++k) {
    const auto& d = prof.derivative;
    const double upp = (-d[k + 2] + 8 * d[k + 1] - 8 * d[k - 1] + d[k - 2]) / (12 * dr);
    const double u = prof.values[k];
    const double r = prof.radii[k];
    res = std::max(res, std::fabs(-upp - (dim - 1) / r * d[k] + u - std::pow(u, p - 1.0)));
  }
  prof.residual = res;
  if (!(res < tol))
    throw ConvergenceError("ground state: ODE residual " + std::to_string(res) +
                               " above tolerance",
                           {lo, hi, res});
  return prof;
}

inline ProfileIntegrals profile_integrals(const RadialProfile& prof) {
  const std::size_t n = prof.radii.size();
  std::vector<double> fp(n), fg(n), f2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = detail::radial_measure(prof.dim, prof.radii[k]);
    const double u = prof.values[k];
    fp[k] = w * std::pow(u, prof.exponent_p);
    fg[k] = w * prof.derivative[k] * prof.derivative[k];
    f2[k] = w * u * u;
  }
  return {detail::simpson(fp, prof.step), detail::simpson(fg, prof.step),
          detail::simpson(f2, prof.step)};
}

/// (∫|∇ψ¹|², ∫(ψ¹)²) for ψ¹ = ∂₁V, V = γU(√A z), in two dimensions.
/// Uses ∫|∇∂₁V|² = ½∫(ΔV)² and ∫(∂₁V)² = ½∫|∇V|² for radial V.
inline std::pair<double, double> kernel_mode_integrals(const RadialProfile& prof,
                                                       const ProfileScaling& s) {
  if (prof.dim != 2) throw ConfigError("kernel mode integrals are two-dimensional");
  const std::size_t n = prof.radii.size();
  std::vector<double> lap2(n), grad2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = prof.values[k];
    const double lap = u - std::pow(u, prof.exponent_p - 1.0);  // ΔU from the equation
    const double w = 2.0 * pi * prof.radii[k];
    lap2[k] = w * lap * lap;
    grad2[k] = w * prof.derivative[k] * prof.derivative[k];
  }
  const double g2 = s.gamma * s.gamma;
  return {0.5 * g2 * s.A * detail::simpson(lap2, prof.step),
          0.5 * g2 * detail::simpson(grad2, prof.step)};
}

/// V(z) = γ U(√A |z|).
inline double scaled_profile(const ProfileScaling& s, const RadialProfile& prof, const Point2& z) {
  return s.gamma * prof.value(std::sqrt(s.A) * norm2(z));
}

/// ψ^i(z) = ∂_i V(z) = γ√A U'(√A|z|) z_i/|z|, with i in {1, 2}.
inline double linearized_profile(const ProfileScaling& s, const RadialProfile& prof, int i,
                                 const Point2& z) {
  if (i != 1 && i != 2) throw ConfigError("linearized profile: axis index must be 1 or 2");
  const double rho = norm2(z);
  if (rho == 0.0) return 0.0;
  const double sa = std::sqrt(s.A);
  return s.gamma * sa * prof.slope(sa * rho) * z[i - 1] / rho;
}

inline void write_profile_csv(std::ostream& os, const RadialProfile& prof) {
  os << "r,U,Uprime\n";
  char buf[96];
  for (std::size_t k = 0; k < prof.radii.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", prof.radii[k], prof.values[k],
                  prof.derivative[k]);
    os << buf;
  }
}

}  // namespace kgmp
