#pragma once
// Long-jump kernels: a symmetric profile h homogeneous of degree -(d+alpha),
// folded onto the periodic lattice, with the jump sampler, discrete generator,
// spectral symbol, energy form, and the quadratic (carre-du-champ type) forms.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "rng.hpp"

namespace longjump {

struct KernelSpec {
  int dim = 1;
  double alpha = 1.0;   // (0,2]; alpha==2 is the log-corrected borderline
  double c_scale = 1.0; // d=1 amplitude: h(z) = c_scale/|z|^{1+alpha}
  // d>=2 angular profile: even cosine series in the polar angle,
  // w(t) = angular[0] + angular[1]*cos(2t) + angular[2]*cos(4t) + ...
  // (even harmonics only, so w(t) = w(t+pi) and the kernel is symmetric).
  std::vector<double> angular;

  void validate() const {
    if (dim < 1) throw std::invalid_argument("kernel: dim must be >= 1");
    if (!(alpha > 0.0) || alpha > 2.0)
      throw std::invalid_argument("kernel: alpha must lie in (0,2]");
    if (dim == 1) {
      if (!(c_scale > 0.0))
        throw std::invalid_argument("kernel: c_scale must be positive");
    } else {
      if (angular.empty())
        throw std::invalid_argument("kernel: angular weights required for dim>=2");
      // strict positivity of the angular profile, checked on a fine grid
      for (int i = 0; i < 720; ++i) {
        double t = std::numbers::pi * i / 720.0;
        if (!(angular_weight(t) > 0.0))
          throw std::invalid_argument("kernel: angular profile not strictly positive");
      }
    }
  }

  double angular_weight(double theta) const {
    double w = 0.0;
    for (std::size_t k = 0; k < angular.size(); ++k)
      w += angular[k] * std::cos(2.0 * static_cast<double>(k) * theta);
    return w;
  }

  // h(z) for integer z != 0 (d=1 or d=2 supported)
  double h(const int* z) const {
    if (dim == 1) {
      double az = std::abs(static_cast<double>(z[0]));
      return c_scale * std::pow(az, -(1.0 + alpha));
    }
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) r2 += static_cast<double>(z[k]) * z[k];
    double r = std::sqrt(r2);
    double w = 1.0;
    if (dim == 2) w = angular_weight(std::atan2(z[1], z[0]));
    return w * std::pow(r, -(dim + alpha));
  }
};

class LatticeKernel {
 public:
  KernelSpec spec;
  Torus grid;
  int fold_cutoff = 64;
  std::vector<double> rates;  // p_N over the fundamental domain, rates[0] = 0
  double p_star = 0.0;
  std::vector<double> cum;    // normalized cumulative over sites, ends at 1

  // --- sampling ---------------------------------------------------------

  // returns the displacement as a flat torus index (never 0)
  long long sample_jump(Rng& rng) const {
    double u = rng.uniform();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    long long idx = it - cum.begin();
    if (idx >= grid.sites()) idx = grid.sites() - 1;
    while (idx > 0 && rates[idx] <= 0.0) --idx;
    if (idx == 0) idx = 1;
    return idx;
  }

  // centered displacement vector of a flat index
  void displacement(long long idx, int* out) const {
    int c[8];
    grid.coords(idx, c);
    for (int k = 0; k < spec.dim; ++k) out[k] = grid.centered(c[k]);
  }

  int displacement1(long long idx) const {
    return grid.centered(static_cast<int>(idx));
  }

  // --- operators --------------------------------------------------------

  // x -> theta * sum_z p_N(z) (G(x+z) - G(x)); theta carries the time scale
  Field apply_Ln(const Field& G, double theta) const {
    require_same_grid(grid, G, "apply_Ln");
    const long long S = grid.sites();
    Field out(S, 0.0);
    for (long long x = 0; x < S; ++x) {
      double acc = 0.0;
      for (long long z = 1; z < S; ++z)
        acc += rates[z] * (G[grid.shift(x, z)] - G[x]);
      out[x] = theta * acc;
    }
    return out;
  }

  // psi_N(m) = sum_z p_N(z) (cos(2 pi m.z / N) - 1) <= 0
  double levy_symbol(long long mode) const {
    if (mode < 0 || mode >= grid.sites())
      throw std::out_of_range("levy_symbol: mode out of range");
    const long long S = grid.sites();
    int mv[8], zv[8];
    grid.coords(mode, mv);
    double acc = 0.0;
    const double w = 2.0 * std::numbers::pi / grid.n;
    for (long long z = 1; z < S; ++z) {
      if (rates[z] == 0.0) continue;
      grid.coords(z, zv);
      double phase = 0.0;
      for (int k = 0; k < spec.dim; ++k) phase += static_cast<double>(mv[k]) * zv[k];
      acc += rates[z] * (std::cos(w * phase) - 1.0);
    }
    return acc;
  }

  // Discrete energy form on the grid of spacing 1/n:
  //   (1/2) n^{alpha-d} sum_{x,z} p_N(z) (u(x+z)-u(x)) (v(x+z)-v(x)).
  // Satisfies energy(F,G) = -(1/n^d) sum F . apply_Ln(G, n^alpha) exactly.
  double energy(const Field& u, const Field& v, double n) const {
    require_same_grid(grid, u, "energy");
    require_same_grid(grid, v, "energy");
    const long long S = grid.sites();
    double acc = 0.0;
    for (long long x = 0; x < S; ++x)
      for (long long z = 1; z < S; ++z) {
        if (rates[z] == 0.0) continue;
        long long y = grid.shift(x, z);
        acc += rates[z] * (u[y] - u[x]) * (v[y] - v[x]);
      }
    return 0.5 * std::pow(n, spec.alpha - spec.dim) * acc;
  }

  // One-point quadratic form: x -> theta * sum_z p_N(z) (G(x+z)-G(x))^2.
  Field apply_Qn_one(const Field& G, double theta) const {
    require_same_grid(grid, G, "apply_Qn_one");
    const long long S = grid.sites();
    Field out(S, 0.0);
    for (long long x = 0; x < S; ++x) {
      double acc = 0.0;
      for (long long z = 1; z < S; ++z) {
        if (rates[z] == 0.0) continue;
        double d = G[grid.shift(x, z)] - G[x];
        acc += rates[z] * d * d;
      }
      out[x] = theta * acc;
    }
    return out;
  }

  // Two-point antisymmetric extension.  G is a dense S x S table with
  // G[x*S+y] = -G[y*S+x]; intended for small lattices (functional checks).
  Field apply_Ln_two(const std::vector<double>& G, double theta) const {
    check_antisymmetric(G);
    const long long S = grid.sites();
    Field out(S, 0.0);
    for (long long x = 0; x < S; ++x) {
      double acc = 0.0;
      for (long long z = 1; z < S; ++z)
        acc += rates[z] * G[x * S + grid.shift(x, z)];
      out[x] = theta * acc;
    }
    return out;
  }

  Field apply_Qn_two(const std::vector<double>& G, double theta) const {
    check_antisymmetric(G);
    const long long S = grid.sites();
    Field out(S, 0.0);
    for (long long x = 0; x < S; ++x) {
      double acc = 0.0;
      for (long long z = 1; z < S; ++z) {
        double g = G[x * S + grid.shift(x, z)];
        acc += rates[z] * g * g;
      }
      out[x] = theta * acc;
    }
    return out;
  }

 private:
  void check_antisymmetric(const std::vector<double>& G) const {
    const long long S = grid.sites();
    if (static_cast<long long>(G.size()) != S * S)
      throw std::invalid_argument("two-point field: size must be sites^2");
    for (long long x = 0; x < S; ++x)
      for (long long y = 0; y <= x; ++y)
        if (std::abs(G[x * S + y] + G[y * S + x]) > 1e-12)
          throw std::invalid_argument("two-point field: not antisymmetric");
  }
};

// Unchecked core used by the tiny exact-generator oracles (which live on
// lattices as small as N = 3); the public builder enforces the N >= 4 even
// contract.
inline LatticeKernel build_kernel_raw(const KernelSpec& spec, int N, int K = 64) {
  spec.validate();
  if (N < 2) throw std::invalid_argument("build_kernel: N must be >= 2");
  if (K < 0) throw std::invalid_argument("build_kernel: fold cutoff must be >= 0");
  if (spec.dim > 2) throw std::invalid_argument("build_kernel: dim > 2 not supported");

  LatticeKernel k;
  k.spec = spec;
  k.grid = Torus{spec.dim, N};
  k.fold_cutoff = K;
  const long long S = k.grid.sites();
  k.rates.assign(S, 0.0);

  int zc[8], arg[8];
  for (long long z = 1; z < S; ++z) {
    k.displacement(z, zc);
    double acc = 0.0;
    if (spec.dim == 1) {
      for (int f = -K; f <= K; ++f) {
        arg[0] = zc[0] + f * N;
        if (arg[0] == 0) continue;
        acc += spec.h(arg);
      }
    } else {
      for (int f0 = -K; f0 <= K; ++f0)
        for (int f1 = -K; f1 <= K; ++f1) {
          arg[0] = zc[0] + f0 * N;
          arg[1] = zc[1] + f1 * N;
          if (arg[0] == 0 && arg[1] == 0) continue;
          acc += spec.h(arg);
        }
    }
    k.rates[z] = acc;
  }

  k.p_star = 0.0;
  for (double r : k.rates) k.p_star += r;
  if (!(k.p_star > 0.0) || !std::isfinite(k.p_star))
    throw std::runtime_error("build_kernel: p_star not finite positive");

  k.cum.assign(S, 0.0);
  double run = 0.0;
  for (long long z = 0; z < S; ++z) {
    run += k.rates[z];
    k.cum[z] = run / k.p_star;
  }
  k.cum[S - 1] = 1.0;  // pin the final entry exactly
  return k;
}

inline LatticeKernel build_kernel(const KernelSpec& spec, int N, int K = 64) {
  if (N < 4) throw std::invalid_argument("build_kernel: N must be >= 4");
  if (N % 2 != 0) throw std::invalid_argument("build_kernel: N must be even");
  return build_kernel_raw(spec, N, K);
}

// ---- continuum constant -------------------------------------------------
// c such that  int h(x) (cos(theta x) - 1) dx = -c |theta|^alpha  (d = 1).

namespace detail {

template <class F>
double adaptive_simpson(F f, double a, double b, double fa, double fm, double fb,
                        double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double h6 = (b - a) / 6.0;
  double whole = h6 * (fa + 4.0 * fm + fb);
  double left = 0.5 * h6 * (fa + 4.0 * flm + fm);
  double right = 0.5 * h6 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(F f, double a, double b, double tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, tol, 40);
}

}  // namespace detail

// 2 * c_scale * int_0^inf (1 - cos(theta x)) x^{-1-alpha} dx, i.e. the value
// of -int h(x)(cos(theta x)-1)dx over the whole line.
inline double symbol_integral(double alpha, double c_scale, double theta) {
  if (!(alpha > 0.0) || alpha >= 2.0)
    throw std::invalid_argument("symbol_integral: alpha must lie in (0,2)");
  theta = std::abs(theta);
  if (theta == 0.0) return 0.0;
  // [0,1]: alternating power series, regular at the endpoint singularity
  double series = 0.0, t2k = 1.0;
  for (int k = 1; k <= 60; ++k) {
    t2k *= theta * theta / ((2.0 * k - 1.0) * (2.0 * k));
    double term = t2k / (2.0 * k - alpha);
    series += (k % 2 == 1) ? term : -term;
    if (t2k < 1e-18 * std::max(1.0, std::abs(series))) break;
  }
  // [1, A]: adaptive quadrature
  const double A = 200.0;
  auto f = [&](double x) {
    return (1.0 - std::cos(theta * x)) * std::pow(x, -(1.0 + alpha));
  };
  double mid = detail::integrate(f, 1.0, A, 1e-13);
  // [A, inf): integrate by parts three times on the cosine piece
  double tail = std::pow(A, -alpha) / alpha;
  double j = -std::sin(theta * A) * std::pow(A, -(1.0 + alpha)) / theta +
             (1.0 + alpha) / theta *
                 (std::cos(theta * A) * std::pow(A, -(2.0 + alpha)) / theta +
                  (2.0 + alpha) / theta *
                      (std::sin(theta * A) * std::pow(A, -(3.0 + alpha)) / theta));
  tail -= j;
  return 2.0 * c_scale * (series + mid + tail);
}

inline double continuum_c(double alpha, double c_scale) {
  return symbol_integral(alpha, c_scale, 1.0);
}

}  // namespace longjump
