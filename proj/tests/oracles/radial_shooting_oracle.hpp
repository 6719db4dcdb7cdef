#pragma once
// Independent reference for the radial ground state of -U'' - (n-1)/r U' + U = U^{p-1}.
// Deliberately shares no code with include/kgmp: plain bisection on U(0) with a
// fixed-step RK4 at h = 1e-4 and trapezoid quadrature with Richardson extrapolation.

#include <cmath>
#include <utility>
#include <vector>

namespace kgmp_oracle {

struct ShootResult {
  std::vector<double> r;
  std::vector<double> u;
  int fate = 0;  // +1 overshoot (crossed zero), -1 undershoot (turned up), 0 undecided
};

inline ShootResult shoot(int dim, double p, double u0, double h, double r_end) {
  auto rhs = [&](double r, double u, double up) {
    double upp = -(dim - 1) / r * up + u - std::pow(std::fabs(u), p - 2) * u;
    return upp;
  };
  ShootResult out;
  double r = 1e-6;
  double u = u0 + u0 * (std::pow(u0, p - 2) - 1.0) * r * r / (2.0 * dim);
  double up = -u0 * (std::pow(u0, p - 2) - 1.0) * r / dim;
  out.r.push_back(0.0);
  out.u.push_back(u0);
  while (r < r_end) {
    double k1u = up, k1v = rhs(r, u, up);
    double k2u = up + 0.5 * h * k1v, k2v = rhs(r + 0.5 * h, u + 0.5 * h * k1u, up + 0.5 * h * k1v);
    double k3u = up + 0.5 * h * k2v, k3v = rhs(r + 0.5 * h, u + 0.5 * h * k2u, up + 0.5 * h * k2v);
    double k4u = up + h * k3v, k4v = rhs(r + h, u + h * k3u, up + h * k3v);
    u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    up += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    r += h;
    if (u < 0.0) { out.fate = +1; break; }
    if (up > 0.0) { out.fate = -1; break; }
    out.r.push_back(r);
    out.u.push_back(u);
  }
  return out;
}

// Returns (U(0), integral of U^p over R^dim).
inline std::pair<double, double> ground_state(int dim, double p, double h = 1e-4) {
  double lo = 1.0, hi = 10.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    auto s = shoot(dim, p, mid, h, 40.0);
    if (s.fate > 0) hi = mid; else lo = mid;
  }
  double u0 = 0.5 * (lo + hi);
  auto s = shoot(dim, p, u0, h, 40.0);
  // keep the trustworthy part of the trajectory (stop before the growing mode takes over)
  std::size_t m = s.u.size();
  while (m > 2 && s.u[m - 1] < 1e-7 * u0) --m;
  auto measure = [&](double r) {
    if (dim == 1) return 2.0;
    if (dim == 2) return 2.0 * M_PI * r;
    return 4.0 * M_PI * r * r;
  };
  auto trap = [&](std::size_t stride) {
    double acc = 0.0;
    for (std::size_t i = 0; i + stride < m; i += stride) {
      double f0 = measure(s.r[i]) * std::pow(s.u[i], p);
      double f1 = measure(s.r[i + stride]) * std::pow(s.u[i + stride], p);
      acc += 0.5 * (s.r[i + stride] - s.r[i]) * (f0 + f1);
    }
    return acc;
  };
  std::size_t usable = ((m - 1) / 2) * 2 + 1;
  m = usable;
  double fine = trap(1), coarse = trap(2);
  return {u0, fine + (fine - coarse) / 3.0};
}

}  // namespace kgmp_oracle
