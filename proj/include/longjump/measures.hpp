#pragma once
// Thermodynamics of the zero-range invariant product measures: partition
// function Z, fugacity/density conversion, exponential moments, entropy, and
// exact product-measure samplers (including the monotone quantile coupling).

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "kernel.hpp"
#include "rng.hpp"

namespace longjump {

// ---- interaction rate ---------------------------------------------------

struct RateFunction {
  std::vector<double> table;  // g(0..cap); table[0] == 0
  enum class Extension { clamp, linear } ext = Extension::clamp;
  double kappa = 0.0;   // Lipschitz constant sup |g(n+1)-g(n)|
  bool monotone = false;

  double operator()(long long n) const {
    if (n < 0) throw std::invalid_argument("rate: negative occupancy");
    long long cap = static_cast<long long>(table.size()) - 1;
    if (n <= cap) return table[n];
    if (ext == Extension::clamp) return table[cap];
    double slope = table[cap] - table[cap - 1];
    return table[cap] + slope * static_cast<double>(n - cap);
  }

  void finalize() {
    if (table.size() < 2 || table[0] != 0.0)
      throw std::invalid_argument("rate: table must start with g(0)=0");
    kappa = 0.0;
    monotone = true;
    for (std::size_t i = 1; i < table.size(); ++i) {
      if (!(table[i] > 0.0))
        throw std::invalid_argument("rate: g(n) must be positive for n>0");
      double d = table[i] - table[i - 1];
      kappa = std::max(kappa, std::abs(d));
      if (d < 0.0) monotone = false;
    }
  }

  static RateFunction linear(int cap = 256) {
    RateFunction r;
    r.table.resize(cap + 1);
    for (int i = 0; i <= cap; ++i) r.table[i] = i;
    r.ext = Extension::linear;
    r.finalize();
    return r;
  }

  static RateFunction indicator() {
    RateFunction r;
    r.table = {0.0, 1.0, 1.0};
    r.ext = Extension::clamp;
    r.finalize();
    return r;
  }

  static RateFunction capped(int m, int cap = 64) {
    RateFunction r;
    r.table.resize(std::max(cap, m + 1) + 1);
    for (std::size_t i = 0; i < r.table.size(); ++i)
      r.table[i] = std::min<double>(static_cast<double>(i), m);
    r.ext = Extension::clamp;
    r.finalize();
    return r;
  }
};

struct RateClass {
  bool fem = false;                                    // g(n) -> infinity
  double phi_c = std::numeric_limits<double>::infinity();
};

// (FEM) iff g -> infinity (monotone g); otherwise (B) with phi_c = lim g(n),
// estimated by a ratio test far beyond the table.
inline RateClass classify_rate(const RateFunction& g) {
  if (!g.monotone)
    throw std::invalid_argument("classify_rate: stated for nondecreasing g only");
  RateClass rc;
  double g1 = g(1LL << 20), g2 = g(1LL << 21);
  if (g2 > g1 * (1.0 + 1e-9)) {
    rc.fem = true;
    rc.phi_c = std::numeric_limits<double>::infinity();
  } else {
    rc.fem = false;
    rc.phi_c = g2;
  }
  return rc;
}

// ---- site marginal q_rho ------------------------------------------------

struct SiteDist {
  std::vector<double> pmf;  // q(k), k = 0..K
  std::vector<double> cdf;
  double mean = 0.0;

  long long quantile(double u) const {
    // inverse CDF: smallest k with cdf[k] > u
    long long lo = 0, hi = static_cast<long long>(cdf.size()) - 1;
    while (lo < hi) {
      long long mid = (lo + hi) / 2;
      if (cdf[mid] > u) hi = mid;
      else lo = mid + 1;
    }
    return lo;
  }

  long long sample(Rng& rng) const { return quantile(rng.uniform()); }
};

// ---- thermodynamic functions --------------------------------------------

class ThermoFunctions {
 public:
  RateFunction rate;
  double phi_c = std::numeric_limits<double>::infinity();
  static constexpr double kMargin = 1e-3;
  static constexpr long long kMaxTerms = 100000;

  explicit ThermoFunctions(RateFunction g) : rate(std::move(g)) {
    if (rate.monotone) phi_c = classify_rate(rate).phi_c;
    // non-monotone rates keep phi_c = +inf sentinel; series convergence is
    // still checked term by term.
  }

  void check_subcritical(double phi) const {
    if (!(phi >= 0.0)) throw std::invalid_argument("fugacity must be >= 0");
    if (phi >= phi_c * (1.0 - kMargin))
      throw std::domain_error("supercritical fugacity");
  }

  // Z(phi) = sum_k phi^k / g(k)!
  double partition_Z(double phi) const {
    check_subcritical(phi);
    double sum = 0.0, term = 1.0;  // k = 0 term
    for (long long k = 0;; ++k) {
      sum += term;
      double next = term * phi / rate(k + 1);
      if (k >= 1 && next < 1e-16 * sum) break;
      if (k + 1 >= kMaxTerms)
        throw std::runtime_error("partition_Z: series truncation failure");
      term = next;
      if (phi == 0.0) break;
    }
    return sum;
  }

  // rho(phi) = mean occupancy under the product marginal at fugacity phi
  double density_of_fugacity(double phi) const {
    check_subcritical(phi);
    if (phi == 0.0) return 0.0;
    double z = 0.0, num = 0.0, term = 1.0;
    for (long long k = 0;; ++k) {
      z += term;
      num += static_cast<double>(k) * term;
      double next = term * phi / rate(k + 1);
      if (k >= 1 && next < 1e-16 * (z + num)) break;
      if (k + 1 >= kMaxTerms)
        throw std::runtime_error("density_of_fugacity: series truncation failure");
      term = next;
    }
    return num / z;
  }

  // phi(rho): inverse of rho(phi), bisection to |rho(phi)-rho| < 1e-10
  double fugacity_of_density(double rho) const {
    if (!(rho >= 0.0)) throw std::invalid_argument("density must be >= 0");
    if (rho == 0.0) return 0.0;
    double hi_cap = std::isfinite(phi_c) ? phi_c * (1.0 - 2.0 * kMargin)
                                         : std::numeric_limits<double>::infinity();
    double hi = std::min(1.0, hi_cap);
    while (density_of_fugacity(hi) < rho) {
      if (hi >= hi_cap * (1.0 - 1e-12) && std::isfinite(hi_cap))
        throw std::domain_error("supercritical density");
      hi = std::isfinite(hi_cap) ? 0.5 * (hi + hi_cap) : hi * 2.0;
      if (hi > 1e12) throw std::runtime_error("fugacity_of_density: no bracket");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      double r = density_of_fugacity(mid);
      if (std::abs(r - rho) < 1e-11) return mid;
      (r < rho ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  // identity check E_{nu_rho}[g] = phi(rho)
  double mean_g(double rho) const {
    double phi = fugacity_of_density(rho);
    if (phi == 0.0) return 0.0;
    double z = 0.0, num = 0.0, term = 1.0;
    for (long long k = 0;; ++k) {
      z += term;
      num += rate(k) * term;
      double next = term * phi / rate(k + 1);
      if (k >= 1 && next < 1e-16 * (z + std::abs(num))) break;
      if (k + 1 >= kMaxTerms) throw std::runtime_error("mean_g: truncation failure");
      term = next;
    }
    return num / z;
  }

  // M_rho(theta) = Z(phi e^theta) / Z(phi)
  double site_mgf(double rho, double theta) const {
    double phi = fugacity_of_density(rho);
    double arg = phi * std::exp(theta);
    if (arg >= phi_c * (1.0 - kMargin))
      throw std::domain_error("site_mgf: divergent exponential moment");
    return partition_Z(arg) / partition_Z(phi);
  }

  // entropy H(a) = int_rho^a log(phi(x)/phi(rho)) dx, adaptive quadrature
  double entropy_fn(double a, double rho_ref) const {
    if (!(a >= 0.0) || !(rho_ref > 0.0))
      throw std::invalid_argument("entropy_fn: need a >= 0, rho_ref > 0");
    double log_phi_ref = std::log(fugacity_of_density(rho_ref));
    auto integrand = [&](double x) {
      double xc = std::max(x, 1e-12);  // integrable log singularity at 0
      return std::log(fugacity_of_density(xc)) - log_phi_ref;
    };
    if (a == rho_ref) return 0.0;
    double lo = std::min(a, rho_ref), hi = std::max(a, rho_ref);
    double v = detail::integrate(integrand, lo, hi, 1e-11);
    return (a >= rho_ref) ? v : -v;
  }

  // Legendre transform sup_theta { a theta - log M_rho(theta) } by grid scan
  // plus golden-section refinement.
  double legendre_entropy(double a, double rho_ref) const {
    double phi = fugacity_of_density(rho_ref);
    double theta_hi;
    if (std::isfinite(phi_c)) {
      theta_hi = std::log(phi_c * (1.0 - 2.0 * kMargin) / phi);
    } else {
      // bracket the maximizer: past it the objective is decreasing
      theta_hi = 1.0;
      while (theta_hi < 60.0 &&
             density_of_fugacity(phi * std::exp(theta_hi)) < a)
        theta_hi += 1.0;
      theta_hi += 1.0;
    }
    double theta_lo = -40.0;
    auto obj = [&](double th) { return a * th - std::log(site_mgf(rho_ref, th)); };
    const int grid = 400;
    double best = theta_lo, best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
      double th = theta_lo + (theta_hi - theta_lo) * i / grid;
      double v = obj(th);
      if (v > best_v) { best_v = v; best = th; }
    }
    double step = (theta_hi - theta_lo) / grid;
    double lo = std::max(theta_lo, best - step), hi = std::min(theta_hi, best + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = obj(c), fd = obj(d);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      if (fc > fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = obj(c); }
      else { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = obj(d); }
    }
    return obj(0.5 * (lo + hi));
  }

  // pmf table of q_rho with tail mass < 1e-12 (construction fails otherwise)
  SiteDist site_dist(double rho) const {
    double phi = fugacity_of_density(rho);
    SiteDist d;
    double term = 1.0, sum = 0.0;
    std::vector<double> terms;
    for (long long k = 0;; ++k) {
      terms.push_back(term);
      sum += term;
      double next = (phi == 0.0) ? 0.0 : term * phi / rate(k + 1);
      if (k >= 1 || phi == 0.0) {
        double r = (term > 0.0) ? next / term : 0.0;
        if (next < 1e-16 * sum) {
          double tail = (r < 1.0) ? next / (1.0 - r) : std::numeric_limits<double>::infinity();
          if (!(tail / sum < 1e-12))
            throw std::runtime_error("site_dist: pmf cap overflow probability too large");
          break;
        }
      }
      if (k + 1 >= kMaxTerms)
        throw std::runtime_error("site_dist: pmf table overflow");
      term = next;
    }
    d.pmf.resize(terms.size());
    d.cdf.resize(terms.size());
    double run = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      d.pmf[k] = terms[k] / sum;
      run += d.pmf[k];
      d.cdf[k] = run;
      d.mean += static_cast<double>(k) * d.pmf[k];
    }
    d.cdf.back() = 1.0;
    return d;
  }
};

// ---- profiles -----------------------------------------------------------

struct Profile {
  enum class Kind { constant, step, cosine } kind = Kind::constant;
  // constant: value = a
  // step: a + b * 1{x in [x0, x1)}   (x on the unit torus)
  // cosine: a + b * cos(2 pi m x)
  double a = 0.0, b = 0.0, x0 = 0.0, x1 = 0.0;
  int m = 1;

  double operator()(double x) const {
    x -= std::floor(x);
    switch (kind) {
      case Kind::constant: return a;
      case Kind::step: return a + (x >= x0 && x < x1 ? b : 0.0);
      case Kind::cosine: return a + b * std::cos(2.0 * std::numbers::pi * m * x);
    }
    return a;
  }

  // cell average over [xl, xr); exact interval integration for step profiles,
  // midpoint for smooth ones
  double cell_average(double xl, double xr) const {
    if (kind == Kind::step) {
      double base = xl - std::floor(xl);
      double shift = base - xl;
      double lo = xl + shift, hi = xr + shift;  // lo in [0,1)
      double frac = overlap(lo, hi, x0, x1) + overlap(lo - 1.0, hi - 1.0, x0, x1) +
                    overlap(lo + 1.0, hi + 1.0, x0, x1);
      return a + b * frac / (xr - xl);
    }
    return (*this)(0.5 * (xl + xr));
  }

  static Profile constant(double v) { return {Kind::constant, v, 0, 0, 0, 1}; }
  static Profile step(double base, double height, double lo, double hi) {
    return {Kind::step, base, height, lo, hi, 1};
  }
  static Profile cosine(double base, double amp, int mode) {
    return {Kind::cosine, base, amp, 0, 0, mode};
  }

 private:
  static double overlap(double lo, double hi, double a0, double a1) {
    double l = std::max(lo, a0), r = std::min(hi, a1);
    return std::max(0.0, r - l);
  }
};

// density targets per site: site z covers [z/n - 1/(2n), z/n + 1/(2n))
inline std::vector<double> profile_site_means(const Profile& u0, int N, int n) {
  std::vector<double> mu(N);
  for (int z = 0; z < N; ++z) {
    double xl = (z - 0.5) / n, xr = (z + 0.5) / n;
    mu[z] = u0.cell_average(xl, xr);
  }
  return mu;
}

// ---- product-measure samplers ------------------------------------------

inline std::vector<int> sample_profile_measure_zr(const ThermoFunctions& tf,
                                                  const Profile& u0, int N, int n,
                                                  Rng& rng) {
  auto mu = profile_site_means(u0, N, n);
  std::map<double, SiteDist> dists;
  std::vector<int> occ(N);
  for (int z = 0; z < N; ++z) {
    auto it = dists.find(mu[z]);
    if (it == dists.end()) it = dists.emplace(mu[z], tf.site_dist(mu[z])).first;
    occ[z] = static_cast<int>(it->second.sample(rng));
  }
  return occ;
}

inline std::vector<int> sample_profile_measure_ex(const Profile& u0, int N, int n,
                                                  Rng& rng) {
  auto mu = profile_site_means(u0, N, n);
  std::vector<int> occ(N);
  for (int z = 0; z < N; ++z) {
    if (!(mu[z] >= 0.0 && mu[z] <= 1.0))
      throw std::invalid_argument("exclusion profile must lie in [0,1]");
    occ[z] = rng.uniform() < mu[z] ? 1 : 0;
  }
  return occ;
}

// quantile coupling with one shared uniform: marginals exact, x1 <= x2
inline std::pair<long long, long long> monotone_pair_sample(const SiteDist& d1,
                                                            const SiteDist& d2,
                                                            Rng& rng) {
  double u = rng.uniform();
  return {d1.quantile(u), d2.quantile(u)};
}

// H(nu^n | nu_rho) for a product measure with sitewise densities mu
inline double product_relative_entropy(const ThermoFunctions& tf,
                                       const std::vector<double>& mu,
                                       double rho_ref) {
  // log ref(k) computed analytically so the reference never truncates before
  // the profile marginals do
  double phi_ref = tf.fugacity_of_density(rho_ref);
  if (phi_ref <= 0.0) return std::numeric_limits<double>::infinity();
  double log_phi = std::log(phi_ref);
  double log_Z = std::log(tf.partition_Z(phi_ref));
  std::vector<double> log_ref = {-log_Z};  // k = 0
  std::map<double, SiteDist> dists;
  double H = 0.0;
  for (double u : mu) {
    auto it = dists.find(u);
    if (it == dists.end()) it = dists.emplace(u, tf.site_dist(u)).first;
    const SiteDist& q = it->second;
    while (log_ref.size() < q.pmf.size())
      log_ref.push_back(log_ref.back() + log_phi -
                        std::log(tf.rate(static_cast<long long>(log_ref.size()))));
    for (std::size_t k = 0; k < q.pmf.size(); ++k) {
      if (q.pmf[k] <= 0.0) continue;
      H += q.pmf[k] * (std::log(q.pmf[k]) - log_ref[k]);
    }
  }
  return H;
}

}  // namespace longjump
