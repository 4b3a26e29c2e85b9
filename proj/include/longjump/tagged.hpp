#pragma once
// Tagged particle in the zero-range process: the environment process seen
// from the tag (origin rates use gbar(n) = n g(n+1)/(n+1), translations use
// b(n) = g(n)/n with b(0) := g(1), matching the joint construction where a
// lone tagged particle jumps at rate p(z) g(1)), the joint (xi, X) dynamics,
// and the exponential-martingale / characteristic-function functionals.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dynamics.hpp"
#include "kernel.hpp"
#include "measures.hpp"
#include "rng.hpp"
#include "sumtree.hpp"

namespace longjump {

inline double gbar_rate(const RateFunction& g, long long n) {
  return static_cast<double>(n) * g(n + 1) / static_cast<double>(n + 1);
}

inline double b_rate(const RateFunction& g, long long n) {
  if (n == 0) return g(1);
  return g(n) / static_cast<double>(n);
}

struct TaggedTrajectory {
  std::vector<double> times;    // macro
  std::vector<long long> X;     // unwrapped tagged position
  std::vector<double> b_micro;  // int_0^t b(zeta_s(0)) d(micro s)
  long long windings = 0;       // |X| excursions past N/2 (aliasing monitor)
};

// Environment process: zeta on the torus with the tag pinned at the origin.
// Implemented with a rotating origin offset; leaf S of the weight tree is the
// translation channel.
class TaggedEnvSim {
 public:
  const LatticeKernel* kernel = nullptr;
  RateFunction g;
  std::vector<int> zeta_arr;  // zeta(x) = zeta_arr[wrap(origin + x)]
  long long origin = 0;
  long long X = 0;
  std::vector<long long> jump_counts;  // per displacement index
  SimClock clock;
  Rng rng;
  double b_micro = 0.0;

  TaggedEnvSim(const LatticeKernel& k, RateFunction rate, std::vector<int> zeta0,
               double theta, std::uint64_t seed)
      : kernel(&k), g(std::move(rate)), zeta_arr(std::move(zeta0)), rng(seed) {
    clock.theta = theta;
    const long long S = k.grid.sites();
    if (static_cast<long long>(zeta_arr.size()) != S)
      throw std::invalid_argument("tagged env: size mismatch");
    jump_counts.assign(S, 0);
    tree_.resize(S + 1);
    for (long long p = 0; p < S; ++p) tree_.set(p, g(zeta_arr[p]));
    refresh_origin();
  }

  int zeta(long long x) const {
    return zeta_arr[kernel->grid.shift(origin, kernel->grid.wrap(x))];
  }
  int zeta0() const { return zeta_arr[origin]; }

  double total_rate() const { return kernel->p_star * tree_.total(); }

  void apply_event() {
    const long long S = kernel->grid.sites();
    long long leaf = static_cast<long long>(tree_.sample(rng.uniform() * tree_.total()));
    long long z = kernel->sample_jump(rng);
    if (leaf == S) {
      // translation: the tag jumps by z; the environment shifts by -z
      long long old_origin = origin;
      origin = kernel->grid.shift(origin, z);
      X += displacement_value(z);
      jump_counts[z] += 1;
      refresh_origin_from(old_origin);
    } else {
      long long p = leaf;
      long long q = kernel->grid.shift(p, z);
      zeta_arr[p] -= 1;
      zeta_arr[q] += 1;
      set_site_weight(p);
      set_site_weight(q);
      if (p == origin || q == origin) tree_.set(S, b_rate(g, zeta_arr[origin]));
    }
    ++clock.events;
    if ((clock.events & ((1LL << 24) - 1)) == 0) tree_.rebuild();
  }

  // advance recording state at each schedule time (pre-event state at the
  // crossing; discarded clocks are valid by memorylessness)
  TaggedTrajectory run_schedule(const std::vector<double>& schedule) {
    TaggedTrajectory tr;
    std::size_t si = 0;
    double t_macro = clock.macro();
    for (;;) {
      double rate = total_rate();
      double t_next = (rate > 0.0)
                          ? t_macro + rng.exponential(rate) / clock.theta
                          : std::numeric_limits<double>::infinity();
      while (si < schedule.size() && schedule[si] <= t_next) {
        b_micro += b_rate(g, zeta_arr[origin]) * (schedule[si] - t_macro) * clock.theta;
        t_macro = schedule[si];
        tr.times.push_back(t_macro);
        tr.X.push_back(X);
        tr.b_micro.push_back(b_micro);
        ++si;
      }
      if (si >= schedule.size()) {
        clock.micro = t_macro * clock.theta;
        tr.windings = std::abs(X) > kernel->grid.n / 2 ? 1 : 0;
        return tr;
      }
      b_micro += b_rate(g, zeta_arr[origin]) * (t_next - t_macro) * clock.theta;
      t_macro = t_next;
      clock.micro = t_macro * clock.theta;
      apply_event();
    }
  }

  long long displacement_value(long long z) const {
    return kernel->grid.centered(static_cast<int>(z));
  }

 private:
  SumTree tree_;

  void set_site_weight(long long p) {
    tree_.set(p, p == origin ? gbar_rate(g, zeta_arr[p]) : g(zeta_arr[p]));
  }

  void refresh_origin() {
    const long long S = kernel->grid.sites();
    set_site_weight(origin);
    tree_.set(S, b_rate(g, zeta_arr[origin]));
  }

  void refresh_origin_from(long long old_origin) {
    tree_.set(old_origin, g(zeta_arr[old_origin]));  // ordinary site again
    refresh_origin();
  }
};

// Joint (xi, X) dynamics: standard zero-range process with a distinguished
// particle; when a particle leaves the tag's site, the tag is the one that
// jumps with probability 1/xi(site).
class JointTaggedSim {
 public:
  const LatticeKernel* kernel = nullptr;
  RateFunction g;
  std::vector<int> occ;
  long long tag_site = 0;
  long long X = 0;
  SimClock clock;
  Rng rng;

  JointTaggedSim(const LatticeKernel& k, RateFunction rate, std::vector<int> occ0,
                 long long tag, double theta, std::uint64_t seed)
      : kernel(&k), g(std::move(rate)), occ(std::move(occ0)), tag_site(tag),
        rng(seed) {
    clock.theta = theta;
    const long long S = k.grid.sites();
    if (static_cast<long long>(occ.size()) != S)
      throw std::invalid_argument("joint tagged: size mismatch");
    if (occ[tag_site] < 1)
      throw std::invalid_argument("joint tagged: tag site must be occupied");
    tree_.resize(S);
    for (long long x = 0; x < S; ++x) tree_.set(x, g(occ[x]));
  }

  double total_rate() const { return kernel->p_star * tree_.total(); }

  void apply_event() {
    long long a = static_cast<long long>(tree_.sample(rng.uniform() * tree_.total()));
    long long z = kernel->sample_jump(rng);
    long long b = kernel->grid.shift(a, z);
    if (a == tag_site && rng.uniform() * occ[a] < 1.0) {
      tag_site = b;
      X += kernel->grid.centered(static_cast<int>(z));
    }
    occ[a] -= 1;
    occ[b] += 1;
    tree_.set(a, g(occ[a]));
    tree_.set(b, g(occ[b]));
    ++clock.events;
    if ((clock.events & ((1LL << 24) - 1)) == 0) tree_.rebuild();
  }

  void run_until(double T_macro) {
    double T_micro = T_macro * clock.theta;
    for (;;) {
      double rate = total_rate();
      if (rate <= 0.0) { clock.micro = T_micro; return; }
      double dt = rng.exponential(rate);
      if (clock.micro + dt >= T_micro) { clock.micro = T_micro; return; }
      clock.micro += dt;
      apply_event();
    }
  }

 private:
  SumTree tree_;
};

// Palm start: sites away from the tag get q_rho, the tag site gets the
// size-biased marginal, and zeta(0) = xi(tag) - 1.
inline std::vector<int> sample_palm_env(const ThermoFunctions& tf, double rho, int N,
                                        Rng& rng) {
  SiteDist q = tf.site_dist(rho);
  // size-biased pmf: k q(k) / rho
  SiteDist sb;
  sb.pmf.resize(q.pmf.size());
  sb.cdf.resize(q.pmf.size());
  double norm = 0.0;
  for (std::size_t k = 0; k < q.pmf.size(); ++k) norm += k * q.pmf[k];
  double run = 0.0;
  for (std::size_t k = 0; k < q.pmf.size(); ++k) {
    sb.pmf[k] = k * q.pmf[k] / norm;
    run += sb.pmf[k];
    sb.cdf[k] = run;
  }
  sb.cdf.back() = 1.0;
  std::vector<int> zeta(N);
  zeta[0] = static_cast<int>(sb.sample(rng)) - 1;  // minus the tag itself
  for (int x = 1; x < N; ++x) zeta[x] = static_cast<int>(q.sample(rng));
  return zeta;
}

// complex jump symbol S(theta) = sum_z p_N(z) (e^{i theta z_c / n} - 1)
inline std::complex<double> tagged_jump_symbol(const LatticeKernel& k, double theta,
                                               double n) {
  std::complex<double> acc = 0.0;
  const long long S = k.grid.sites();
  for (long long z = 1; z < S; ++z) {
    double zc = static_cast<double>(k.grid.centered(static_cast<int>(z)));
    acc += k.rates[z] *
           (std::exp(std::complex<double>(0.0, theta * zc / n)) - 1.0);
  }
  return acc;
}

// exponential martingale along a recorded trajectory:
//   M_t = exp{ i theta X_t / n  -  S(theta) * int_0^t b(zeta_s(0)) d(micro s) }
inline std::vector<std::complex<double>> exp_martingale(const TaggedTrajectory& tr,
                                                        double theta,
                                                        const LatticeKernel& k,
                                                        double n) {
  if (tr.b_micro.empty())
    throw std::invalid_argument("exp_martingale: trajectory lacks b segments");
  std::complex<double> s = tagged_jump_symbol(k, theta, n);
  std::vector<std::complex<double>> out(tr.times.size());
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::complex<double> expo(0.0, theta * static_cast<double>(tr.X[i]) / n);
    expo -= s * tr.b_micro[i];
    out[i] = std::exp(expo);
  }
  return out;
}

struct CfPoint {
  double theta = 0.0;
  double re = 0.0, im = 0.0;
  double se_re = 0.0, se_im = 0.0;
};

// empirical characteristic function with jackknife standard errors
inline std::vector<CfPoint> empirical_cf(const std::vector<double>& samples,
                                         const std::vector<double>& thetas) {
  if (samples.empty()) throw std::invalid_argument("empirical_cf: no samples");
  const double R = static_cast<double>(samples.size());
  std::vector<CfPoint> out;
  for (double th : thetas) {
    CfPoint p;
    p.theta = th;
    double sr = 0.0, si = 0.0;
    std::vector<double> cr(samples.size()), ci(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      cr[i] = std::cos(th * samples[i]);
      ci[i] = std::sin(th * samples[i]);
      sr += cr[i];
      si += ci[i];
    }
    p.re = sr / R;
    p.im = si / R;
    if (samples.size() > 1) {
      double vr = 0.0, vi = 0.0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        double lr = (sr - cr[i]) / (R - 1.0) - p.re;
        double li = (si - ci[i]) / (R - 1.0) - p.im;
        vr += lr * lr;
        vi += li * li;
      }
      p.se_re = std::sqrt(vr * (R - 1.0) / R);
      p.se_im = std::sqrt(vi * (R - 1.0) / R);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace longjump
