#pragma once
// Krylov solvers on nodal fields and an FFT preconditioner for periodic 5-point stencils.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "kgmp/common.hpp"

namespace kgmp {

using LinearMap = std::function<void(const Field&, Field&)>;

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

/// Preconditioned conjugate gradients for an SPD system A x = b.
inline SolveReport pcg(const LinearMap& apply, const LinearMap& precond, const Field& b, Field& x,
                       double tol, int max_iter) {
  SolveReport rep;
  const std::size_t n = b.size();
  if (x.size() != n) x = Field(n, 0.0);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    x = Field(n, 0.0);
    return rep;
  }
  Field r(n), z(n), p(n), ap(n);
  apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  double rel = std::sqrt(dot(r, r)) / bnorm;
  rep.history.push_back(rel);
  if (rel < tol) {
    rep.relative_residual = rel;
    return rep;
  }
  precond(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) throw ConvergenceError("pcg: operator not positive definite", rep.history);
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    rel = std::sqrt(dot(r, r)) / bnorm;
    rep.history.push_back(rel);
    rep.iterations = it;
    if (rel < tol) {
      rep.relative_residual = rel;
      return rep;
    }
    precond(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.relative_residual = rel;
  throw ConvergenceError("pcg: no convergence after " + std::to_string(max_iter) + " iterations",
                         rep.history);
}

/// Restarted right-preconditioned GMRES for A x = b (Euclidean inner product).
/// Returns the report; does not throw when the tolerance is missed, callers decide.
inline SolveReport gmres(const LinearMap& apply, const LinearMap& precond, const Field& b, Field& x,
                         double tol, int restart, int max_iter) {
  SolveReport rep;
  const std::size_t n = b.size();
  if (x.size() != n) x = Field(n, 0.0);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    x = Field(n, 0.0);
    return rep;
  }
  Field w(n), tmp(n);
  int total = 0;
  while (total < max_iter) {
    apply(x, tmp);
    Field r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
    double beta = std::sqrt(dot(r, r));
    rep.relative_residual = beta / bnorm;
    if (rep.history.empty()) rep.history.push_back(rep.relative_residual);
    if (rep.relative_residual < tol) break;
    const int m = restart;
    std::vector<Field> v;
    std::vector<Field> zs;
    v.push_back((1.0 / beta) * r);
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && total < max_iter; ++k, ++total) {
      Field z(n);
      precond(v[k], z);
      apply(z, w);
      zs.push_back(std::move(z));
      for (int i = 0; i <= k; ++i) {
        h[i][k] = dot(w, v[i]);
        axpy(-h[i][k], v[i], w);
      }
      h[k + 1][k] = std::sqrt(dot(w, w));
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
        h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
        h[i][k] = t;
      }
      const double den = std::hypot(h[k][k], h[k + 1][k]);
      cs[k] = den == 0.0 ? 1.0 : h[k][k] / den;
      sn[k] = den == 0.0 ? 0.0 : h[k + 1][k] / den;
      h[k][k] = den;
      const double hk1 = h[k + 1][k];
      h[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      rep.history.push_back(std::fabs(g[k + 1]) / bnorm);
      rep.iterations = total + 1;
      if (std::fabs(g[k + 1]) / bnorm < tol || hk1 == 0.0) {
        ++k;
        ++total;
        break;
      }
      v.push_back((1.0 / hk1) * w);
    }
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h[i][j] * y[j];
      y[i] = s / h[i][i];
    }
    for (int i = 0; i < k; ++i) axpy(y[i], zs[i], x);
    if (rep.history.back() < tol) {
      apply(x, tmp);
      double rr = 0.0;
      for (std::size_t i = 0; i < n; ++i) rr += (b[i] - tmp[i]) * (b[i] - tmp[i]);
      rep.relative_residual = std::sqrt(rr) / bnorm;
      if (rep.relative_residual < 10 * tol) break;
    }
  }
  return rep;
}

using InnerProduct = std::function<double(const Field&, const Field&)>;

/// Lanczos estimate of the extreme eigenvalues of an operator self-adjoint in `inner`.
inline std::pair<double, double> lanczos_extremes(const LinearMap& apply, const InnerProduct& inner,
                                                  Field v, int steps) {
  const std::size_t n = v.size();
  Field vprev(n, 0.0), w(n);
  v *= 1.0 / std::sqrt(inner(v, v));
  std::vector<double> alpha, beta;
  std::vector<Field> basis;
  double bprev = 0.0;
  for (int it = 0; it < steps; ++it) {
    basis.push_back(v);
    apply(v, w);
    const double a = inner(w, v);
    for (std::size_t k = 0; k < n; ++k) w[k] -= a * v[k] + bprev * vprev[k];
    for (const Field& q : basis) axpy(-inner(w, q), q, w);  // full reorthogonalization
    alpha.push_back(a);
    const double b = std::sqrt(std::max(0.0, inner(w, w)));
    if (b < 1e-13 * std::fabs(a) || b == 0.0) break;
    beta.push_back(b);
    vprev = v;
    v = (1.0 / b) * w;
    bprev = b;
  }
  const int m = static_cast<int>(alpha.size());
  double lo = alpha[0], hi = alpha[0];
  for (int i = 0; i < m; ++i) {
    const double r = (i > 0 ? std::fabs(beta[i - 1]) : 0.0) + (i < m - 1 ? std::fabs(beta[i]) : 0.0);
    lo = std::min(lo, alpha[i] - r);
    hi = std::max(hi, alpha[i] + r);
  }
  // Sturm-sequence bisection on the tridiagonal matrix
  auto count_below = [&](double x) {
    int c = 0;
    double d = 1.0;
    for (int i = 0; i < m; ++i) {
      d = alpha[i] - x - (i > 0 ? beta[i - 1] * beta[i - 1] / d : 0.0);
      if (d == 0.0) d = 1e-300;
      if (d < 0) ++c;
    }
    return c;
  };
  auto kth = [&](int target) {
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (count_below(mid) > target) b = mid;
      else a = mid;
    }
    return 0.5 * (a + b);
  };
  return {kth(0), kth(m - 1)};
}

namespace detail {
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Exact inverse of the constant-coefficient periodic operator
/// k1(2u - u_E - u_W) + k2(2u - u_N - u_S) + m u on an n1 × n2 grid.
class SpectralPreconditioner {
 public:
  SpectralPreconditioner(std::size_t n1, std::size_t n2, double k1, double k2, double m)
      : n1_(n1), n2_(n2), nc_(n2 / 2 + 1) {
    real_ = fftw_alloc_real(n1_ * n2_);
    spec_ = fftw_alloc_complex(n1_ * nc_);
    {
      std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
      fwd_ = fftw_plan_dft_r2c_2d(static_cast<int>(n1_), static_cast<int>(n2_), real_, spec_,
                                  FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_2d(static_cast<int>(n1_), static_cast<int>(n2_), spec_, real_,
                                  FFTW_ESTIMATE);
    }
    inv_symbol_.resize(n1_ * nc_);
    const double scale = 1.0 / static_cast<double>(n1_ * n2_);
    for (std::size_t i = 0; i < n1_; ++i)
      for (std::size_t j = 0; j < nc_; ++j) {
        const double s = k1 * (2 - 2 * std::cos(2 * pi * i / n1_)) +
                         k2 * (2 - 2 * std::cos(2 * pi * j / n2_)) + m;
        inv_symbol_[i * nc_ + j] = s > 0 ? scale / s : 0.0;
      }
  }
  SpectralPreconditioner(const SpectralPreconditioner&) = delete;
  SpectralPreconditioner& operator=(const SpectralPreconditioner&) = delete;
  ~SpectralPreconditioner() {
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  void apply(const Field& r, Field& z) {
    std::copy(r.begin(), r.end(), real_);
    fftw_execute(fwd_);
    for (std::size_t k = 0; k < n1_ * nc_; ++k) {
      spec_[k][0] *= inv_symbol_[k];
      spec_[k][1] *= inv_symbol_[k];
    }
    fftw_execute(bwd_);
    if (z.size() != r.size()) z = Field(r.size());
    std::copy(real_, real_ + n1_ * n2_, z.begin());
  }

 private:
  std::size_t n1_, n2_, nc_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan fwd_{}, bwd_{};
  std::vector<double> inv_symbol_;
};

}  // namespace kgmp
