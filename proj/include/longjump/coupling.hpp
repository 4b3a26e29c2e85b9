#pragma once
// Ordered couplings: two-class (first/second-class particles), and the
// four-color / three-color constructions.  Classes: B (first), G (second),
// R/W (annihilating third class; a red arriving on a white — or vice versa —
// destroys both and creates a green).  White particles also move, with the
// same surplus-rate rule as red.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "kernel.hpp"
#include "measures.hpp"
#include "rng.hpp"
#include "sumtree.hpp"
#include "dynamics.hpp"

namespace longjump {

struct CoupledConfiguration {
  std::vector<int> B, G, R, W;

  long long sites() const { return static_cast<long long>(B.size()); }

  void validate() const {
    for (long long x = 0; x < sites(); ++x) {
      if (B[x] < 0 || G[x] < 0 || R[x] < 0 || W[x] < 0)
        throw std::invalid_argument("coupled configuration: negative count");
      if (R[x] > 0 && W[x] > 0)
        throw std::invalid_argument("coupled configuration: R and W share a site");
    }
  }
};

enum class ColorClass { B, G, R, W };

struct ColoredEvent {
  long long source = -1, target = -1;
  ColorClass cls = ColorClass::B;
  bool annihilated = false;
};

class ColoredSim {
 public:
  const LatticeKernel* kernel = nullptr;
  RateFunction g;
  CoupledConfiguration c;
  SimClock clock;
  Rng rng;
  bool forbid_w = false;  // three-color mode: W must stay empty
  long long ordering_violations = 0;  // audit counter, must stay 0

  ColoredSim(const LatticeKernel& k, RateFunction rate, CoupledConfiguration c0,
             double theta, std::uint64_t seed, bool three_color = false)
      : kernel(&k), g(std::move(rate)), c(std::move(c0)), rng(seed),
        forbid_w(three_color) {
    if (!g.monotone)
      throw std::invalid_argument("colored coupling: g must be nondecreasing");
    clock.theta = theta;
    const long long S = k.grid.sites();
    if (c.sites() != S) throw std::invalid_argument("colored sim: size mismatch");
    c.validate();
    if (forbid_w)
      for (long long x = 0; x < S; ++x)
        if (c.W[x] != 0)
          throw std::invalid_argument("three-color sim: W layer must be empty");
    tree_.resize(S);
    for (long long x = 0; x < S; ++x) tree_.set(x, site_weight(x));
  }

  // total weight g(B+G+R) + g(B+G+W) - g(B+G); reduces to g(B+G) when R=W=0
  double site_weight(long long x) const {
    int bg = c.B[x] + c.G[x];
    return g(bg + c.R[x]) + g(bg + c.W[x]) - g(bg);
  }

  double total_rate() const { return kernel->p_star * tree_.total(); }

  ColoredEvent apply_event() {
    long long x = static_cast<long long>(tree_.sample(rng.uniform() * tree_.total()));
    int bg = c.B[x] + c.G[x];
    double rB = g(c.B[x]);
    double rG = g(bg) - g(c.B[x]);
    double rR = g(bg + c.R[x]) - g(bg);
    double rW = g(bg + c.W[x]) - g(bg);
    double u = rng.uniform() * (rB + rG + rR + rW);
    ColorClass cls;
    if (u < rB) cls = ColorClass::B;
    else if (u < rB + rG) cls = ColorClass::G;
    else if (u < rB + rG + rR) cls = ColorClass::R;
    else cls = ColorClass::W;

    long long z = kernel->sample_jump(rng);
    long long y = kernel->grid.shift(x, z);
    ColoredEvent ev{x, y, cls, false};
    switch (cls) {
      case ColorClass::B: c.B[x]--; c.B[y]++; break;
      case ColorClass::G: c.G[x]--; c.G[y]++; break;
      case ColorClass::R:
        c.R[x]--;
        if (c.W[y] > 0) { c.W[y]--; c.G[y]++; ev.annihilated = true; }
        else c.R[y]++;
        break;
      case ColorClass::W:
        c.W[x]--;
        if (c.R[y] > 0) { c.R[y]--; c.G[y]++; ev.annihilated = true; }
        else c.W[y]++;
        break;
    }
    check_site(x);
    check_site(y);
    tree_.set(x, site_weight(x));
    tree_.set(y, site_weight(y));
    ++clock.events;
    if ((clock.events & ((1LL << 24) - 1)) == 0) tree_.rebuild();
    return ev;
  }

  ColoredEvent step() {
    double rate = total_rate();
    if (rate <= 0.0) throw std::runtime_error("colored step: empty configuration");
    clock.micro += rng.exponential(rate);
    return apply_event();
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

  // marginal processes
  std::vector<int> marginal_first() const { return c.B; }
  std::vector<int> marginal_mid() const { return add(c.B, c.G); }
  std::vector<int> marginal_bgr() const { return add(add(c.B, c.G), c.R); }
  std::vector<int> marginal_bgw() const { return add(add(c.B, c.G), c.W); }

 private:
  SumTree tree_;

  static std::vector<int> add(std::vector<int> a, const std::vector<int>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
  }

  void check_site(long long x) const {
    if (c.B[x] < 0 || c.G[x] < 0 || c.R[x] < 0 || c.W[x] < 0 ||
        (c.R[x] > 0 && c.W[x] > 0)) {
      std::ostringstream os;
      os << "colored invariant violated at site " << x << ": B=" << c.B[x]
         << " G=" << c.G[x] << " R=" << c.R[x] << " W=" << c.W[x]
         << " after " << clock.events << " events";
      throw std::logic_error(os.str());
    }
  }
};

// two-class coupling = colored sim with empty R/W layers: first class moves
// at g(xi1), second at the surplus g(xi1+delta)-g(xi1)
inline ColoredSim make_two_class(const LatticeKernel& k, RateFunction g,
                                 std::vector<int> xi1, std::vector<int> delta,
                                 double theta, std::uint64_t seed) {
  CoupledConfiguration c;
  c.B = std::move(xi1);
  c.G = std::move(delta);
  c.R.assign(c.B.size(), 0);
  c.W.assign(c.B.size(), 0);
  return ColoredSim(k, std::move(g), std::move(c), theta, seed);
}

// three-way quantile-coupled sandwich: B ~ q_{rho0}, B+G ~ q_{u0}, B+G+R ~ q_{rho1}
inline CoupledConfiguration build_sandwich_initial(const Profile& u0, double rho0,
                                                   double rho1,
                                                   const ThermoFunctions& tf, int N,
                                                   int n, Rng& rng) {
  auto mu = profile_site_means(u0, N, n);
  for (double v : mu)
    if (!(rho0 <= v + 1e-12 && v <= rho1 + 1e-12))
      throw std::invalid_argument("sandwich: profile must lie in [rho0, rho1]");
  SiteDist lo = tf.site_dist(rho0), hi = tf.site_dist(rho1);
  std::map<double, SiteDist> mids;
  CoupledConfiguration c;
  c.B.resize(N); c.G.resize(N); c.R.resize(N); c.W.assign(N, 0);
  for (int x = 0; x < N; ++x) {
    auto it = mids.find(mu[x]);
    if (it == mids.end()) it = mids.emplace(mu[x], tf.site_dist(mu[x])).first;
    double u = rng.uniform();
    long long a = lo.quantile(u), b = it->second.quantile(u), d = hi.quantile(u);
    c.B[x] = static_cast<int>(a);
    c.G[x] = static_cast<int>(b - a);
    c.R[x] = static_cast<int>(d - b);
  }
  c.validate();
  return c;
}

// two-way split keyed on u0(x/n) vs M: B+G+R ~ q_{u0} and B+G+W ~ q_M,
// with R empty where u0 <= M and W empty where u0 > M
inline CoupledConfiguration build_fourcolor_initial(const Profile& u0, double M,
                                                    const ThermoFunctions& tf, int N,
                                                    int n, Rng& rng) {
  auto mu = profile_site_means(u0, N, n);
  SiteDist dm = tf.site_dist(M);
  std::map<double, SiteDist> dists;
  CoupledConfiguration c;
  c.B.resize(N); c.G.assign(N, 0); c.R.assign(N, 0); c.W.assign(N, 0);
  for (int x = 0; x < N; ++x) {
    auto it = dists.find(mu[x]);
    if (it == dists.end()) it = dists.emplace(mu[x], tf.site_dist(mu[x])).first;
    double u = rng.uniform();
    long long lu = it->second.quantile(u), lm = dm.quantile(u);
    if (mu[x] > M) {
      c.B[x] = static_cast<int>(lm);
      c.R[x] = static_cast<int>(lu - lm);
    } else {
      c.B[x] = static_cast<int>(lu);
      c.W[x] = static_cast<int>(lm - lu);
    }
  }
  c.validate();
  return c;
}

}  // namespace longjump
