#pragma once
// Event-driven simulation of the exclusion and zero-range processes with long
// jumps, plus the empirical-field statistics and the Dynkin martingale probe.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "kernel.hpp"
#include "measures.hpp"
#include "rng.hpp"
#include "sumtree.hpp"

namespace longjump {

enum class Model { exclusion, zero_range };

// time rescaling theta(n): n^alpha, or n^2/log n at the alpha=2 borderline
inline double time_scale_theta(double n, double alpha, bool log_corrected) {
  if (log_corrected) return n * n / std::log(n);
  return std::pow(n, alpha);
}

struct SimClock {
  double micro = 0.0;
  double theta = 1.0;
  long long events = 0;
  double macro() const { return micro / theta; }
};

struct EventRecord {
  long long source = -1;
  long long target = -1;
  bool moved = false;
};

class Simulation {
 public:
  const LatticeKernel* kernel = nullptr;
  Model model = Model::exclusion;
  RateFunction g;  // zero-range only
  std::vector<int> occ;
  long long total_particles = 0;
  SimClock clock;
  Rng rng;
  long long event_budget = std::numeric_limits<long long>::max();

  // exclusion bookkeeping: list of occupied sites with back-index
  std::vector<long long> particle_site;
  std::vector<long long> site_particle;
  // zero-range bookkeeping: sum tree over g(occ(x))
  SumTree tree;

  Simulation() = default;

  Simulation(const LatticeKernel& k, Model m, std::vector<int> occ0, double theta,
             std::uint64_t seed, RateFunction rate = RateFunction::linear())
      : kernel(&k), model(m), g(std::move(rate)), occ(std::move(occ0)), rng(seed) {
    clock.theta = theta;
    const long long S = k.grid.sites();
    if (static_cast<long long>(occ.size()) != S)
      throw std::invalid_argument("simulation: occupancy size mismatch");
    total_particles = 0;
    for (long long x = 0; x < S; ++x) {
      if (occ[x] < 0) throw std::invalid_argument("simulation: negative occupancy");
      if (model == Model::exclusion && occ[x] > 1)
        throw std::invalid_argument("simulation: exclusion occupancy must be 0/1");
      total_particles += occ[x];
    }
    if (model == Model::exclusion) {
      site_particle.assign(S, -1);
      for (long long x = 0; x < S; ++x)
        if (occ[x]) {
          site_particle[x] = static_cast<long long>(particle_site.size());
          particle_site.push_back(x);
        }
    } else {
      tree.resize(S);
      for (long long x = 0; x < S; ++x) tree.set(x, g(occ[x]));
    }
  }

  // total microscopic event rate of the current configuration
  double total_rate() const {
    if (model == Model::exclusion)
      return static_cast<double>(total_particles) * kernel->p_star;
    return kernel->p_star * tree.total();
  }

  // apply one event (no clock handling); returns what happened
  EventRecord apply_event() {
    EventRecord rec;
    long long z = kernel->sample_jump(rng);
    if (model == Model::exclusion) {
      long long pid = static_cast<long long>(rng.below(particle_site.size()));
      long long a = particle_site[pid];
      long long b = kernel->grid.shift(a, z);
      rec.source = a;
      rec.target = b;
      if (occ[b] == 0) {  // suppressed otherwise; the particle keeps its clock
        occ[a] = 0;
        occ[b] = 1;
        site_particle[b] = pid;
        site_particle[a] = -1;
        particle_site[pid] = b;
        rec.moved = true;
      }
    } else {
      double u = rng.uniform() * tree.total();
      long long a = static_cast<long long>(tree.sample(u));
      long long b = kernel->grid.shift(a, z);
      rec.source = a;
      rec.target = b;
      occ[a] -= 1;
      occ[b] += 1;
      tree.set(a, g(occ[a]));
      tree.set(b, g(occ[b]));
      rec.moved = true;
      if ((clock.events & ((1LL << 24) - 1)) == 0) tree.rebuild();  // fp drift repair
    }
    ++clock.events;
    if (clock.events > event_budget)
      throw std::runtime_error("simulation: event budget exceeded");
    return rec;
  }

  // draw a waiting time and apply one event
  EventRecord step() {
    double rate = total_rate();
    if (rate <= 0.0) throw std::runtime_error("step: empty configuration");
    clock.micro += rng.exponential(rate);
    return apply_event();
  }

  // advance to macro time T; the event whose clock crosses T is discarded
  // (valid by memorylessness), so the reported state is the pre-event state.
  void run_until(double T_macro) {
    double T_micro = T_macro * clock.theta;
    if (T_micro < clock.micro - 1e-12 * std::max(1.0, clock.micro))
      throw std::invalid_argument("run_until: target in the past");
    for (;;) {
      double rate = total_rate();
      if (rate <= 0.0) {
        clock.micro = T_micro;
        return;
      }
      double dt = rng.exponential(rate);
      if (clock.micro + dt >= T_micro) {
        clock.micro = T_micro;
        return;
      }
      clock.micro += dt;
      apply_event();
    }
  }
};

// ---- statistics ---------------------------------------------------------

// sliding block average: x -> (2l+1)^{-d} sum_{|y|<=l} occ(x+y)
inline Field empirical_field(const Torus& grid, const std::vector<int>& occ, int l) {
  if (l < 0 || 2 * l + 1 > grid.n)
    throw std::invalid_argument("empirical_field: block larger than half the torus");
  const long long S = grid.sites();
  Field out(S, 0.0);
  if (grid.dim == 1) {
    const int n = grid.n;
    long long sum = 0;
    for (int y = -l; y <= l; ++y) sum += occ[grid.wrap(y)];
    for (int x = 0; x < n; ++x) {
      out[x] = static_cast<double>(sum) / (2 * l + 1);
      sum -= occ[grid.wrap(x - l)];
      sum += occ[grid.wrap(x + l + 1)];
    }
  } else {
    int c[8], cc[8];
    for (long long x = 0; x < S; ++x) {
      grid.coords(x, c);
      long long sum = 0, cnt = 0;
      // d=2 only in practice
      for (int dy0 = -l; dy0 <= l; ++dy0)
        for (int dy1 = -l; dy1 <= l; ++dy1) {
          cc[0] = c[0] + dy0;
          cc[1] = c[1] + dy1;
          sum += occ[grid.index(cc)];
          ++cnt;
        }
      out[x] = static_cast<double>(sum) / cnt;
    }
  }
  return out;
}

// V_x^l = | block average of g(occ)  -  phi(block average of occ) |
inline double v_stat(const Torus& grid, const std::vector<int>& occ, long long x,
                     int l, const ThermoFunctions& tf) {
  if (grid.dim != 1) throw std::invalid_argument("v_stat: d=1 only");
  double avg_g = 0.0;
  long long avg_n = 0;
  for (int y = -l; y <= l; ++y) {
    int o = occ[grid.wrap(static_cast<long long>(x) + y)];
    avg_g += tf.rate(o);
    avg_n += o;
  }
  double inv = 1.0 / (2 * l + 1);
  return std::abs(avg_g * inv - tf.fugacity_of_density(avg_n * inv));
}

// ---- Dynkin martingale probe -------------------------------------------

struct ProbeTrajectory {
  std::vector<double> times;  // macro
  std::vector<double> pi;     // pi_t(G)
  std::vector<double> M;      // pi_t - pi_0 - int pi_s(L_n G) ds
  std::vector<double> qv;     // accumulated quadratic variation
};

// Runs the simulation forward, decomposing pi_t(G) into martingale + drift and
// accumulating the quadratic variation exactly (rates are piecewise constant).
inline ProbeTrajectory martingale_probe(Simulation& sim, const Field& G,
                                        const std::vector<double>& schedule) {
  const LatticeKernel& k = *sim.kernel;
  const Torus& grid = k.grid;
  const long long S = grid.sites();
  require_same_grid(grid, G, "martingale_probe");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1])
      throw std::invalid_argument("martingale_probe: schedule not increasing");

  const double theta = sim.clock.theta;
  const double nd = static_cast<double>(S);  // n^d with n = N
  Field LnG = k.apply_Ln(G, theta);
  Field QG = k.apply_Qn_one(G, theta);

  // running sums
  double pi = 0.0, drift = 0.0, sq = 0.0, s2 = 0.0;
  for (long long x = 0; x < S; ++x) {
    double w = (sim.model == Model::exclusion) ? sim.occ[x] : double(sim.occ[x]);
    pi += w * G[x];
    drift += ((sim.model == Model::exclusion) ? double(sim.occ[x])
                                              : sim.g(sim.occ[x])) *
             LnG[x];
    if (sim.model == Model::exclusion) sq += sim.occ[x] * QG[x];
    else sq += sim.g(sim.occ[x]) * QG[x];
  }
  if (sim.model == Model::exclusion) {
    // s2 = theta * sum_{y,z} p(z) eta(y) eta(y+z) (G(y+z)-G(y))^2
    for (long long y = 0; y < S; ++y) {
      if (!sim.occ[y]) continue;
      for (long long z = 1; z < S; ++z) {
        long long t = grid.shift(y, z);
        if (!sim.occ[t]) continue;
        double d = G[t] - G[y];
        s2 += theta * k.rates[z] * d * d;
      }
    }
  }
  pi /= nd;
  const double pi0 = pi;

  auto qv_rate = [&]() {
    double v = (sim.model == Model::exclusion) ? (sq - s2) : sq;
    return v / (nd * nd);
  };
  auto drift_rate = [&]() { return drift / nd; };

  // pair sum of site a against the current occupancies (exclusion)
  auto pair_sum = [&](long long a) {
    double acc = 0.0;
    for (long long z = 1; z < S; ++z) {
      long long t = grid.shift(a, z);
      if (!sim.occ[t]) continue;
      double d = G[t] - G[a];
      acc += k.rates[z] * d * d;
    }
    return theta * acc;
  };

  ProbeTrajectory out;
  double I_drift = 0.0, I_qv = 0.0;
  double t_macro = sim.clock.macro();
  std::size_t si = 0;

  auto record = [&](double at) {
    out.times.push_back(at);
    out.pi.push_back(pi);
    out.M.push_back(pi - pi0 - I_drift);
    out.qv.push_back(I_qv);
  };

  for (;;) {
    double rate = sim.total_rate();
    double t_next;
    bool have_event = rate > 0.0;
    if (have_event) t_next = t_macro + sim.rng.exponential(rate) / theta;
    else t_next = std::numeric_limits<double>::infinity();

    while (si < schedule.size() && schedule[si] <= t_next) {
      double dt = schedule[si] - t_macro;
      I_drift += drift_rate() * dt;
      I_qv += qv_rate() * dt;
      t_macro = schedule[si];
      record(t_macro);
      ++si;
    }
    if (si >= schedule.size()) {
      sim.clock.micro = t_macro * theta;
      return out;
    }
    // commit the event
    double dt = t_next - t_macro;
    I_drift += drift_rate() * dt;
    I_qv += qv_rate() * dt;
    t_macro = t_next;
    sim.clock.micro = t_macro * theta;

    if (sim.model == Model::exclusion) {
      EventRecord rec = sim.apply_event();
      if (rec.moved) {
        long long a = rec.source, b = rec.target;
        // particle left a (occ already updated): redo incremental sums
        pi += (G[b] - G[a]) / nd;
        drift += LnG[b] - LnG[a];
        sq += QG[b] - QG[a];
        // s2: occ now has a empty, b occupied.  Pre-move pairs of a are the
        // post-move pair_sum(a) minus the spurious (a,b) pair, since b was
        // empty before the move.
        double d_ab = G[b] - G[a];
        double spurious = theta * k.rates[grid.diff(a, b)] * d_ab * d_ab;
        s2 += 2.0 * (pair_sum(b) - (pair_sum(a) - spurious));
      }
    } else {
      EventRecord rec = sim.apply_event();
      long long a = rec.source, b = rec.target;
      pi += (G[b] - G[a]) / nd;
      // occ updated already; recompute the two site weights by difference
      drift += (sim.g(sim.occ[a]) - sim.g(sim.occ[a] + 1)) * LnG[a] +
               (sim.g(sim.occ[b]) - sim.g(sim.occ[b] - 1)) * LnG[b];
      sq += (sim.g(sim.occ[a]) - sim.g(sim.occ[a] + 1)) * QG[a] +
            (sim.g(sim.occ[b]) - sim.g(sim.occ[b] - 1)) * QG[b];
    }
  }
}

// ---- moving-particle path decomposition --------------------------------

struct MovePath {
  long long adjusted_target = 0;
  std::vector<long long> jumps;  // displacements summing to adjusted_target - y
};

// Decompose the relocation y -> z into at most four jumps of two lengths:
// with |z-y| = 6 m0, take k = 2 m0 + j and use two jumps of length k and two
// of length m0 - j (zero-length jumps dropped).
inline MovePath move_path(long long y, long long z, long long j = -1,
                          bool auto_adjust = false) {
  if (y == z) throw std::invalid_argument("move_path: y == z");
  long long diff = z - y;
  long long sign = diff > 0 ? 1 : -1;
  long long m = std::abs(diff);
  if (m % 6 != 0) {
    if (!auto_adjust)
      throw std::invalid_argument("move_path: |z-y| not divisible by 6");
    long long down = m - m % 6;
    m = (down >= 6) ? down : 6;  // move the target by at most 5
  }
  long long m0 = m / 6;
  if (j < 0) j = (m0 + 1) / 2;
  if (j < 1 || j > m0) throw std::invalid_argument("move_path: j out of range");
  long long k = 2 * m0 + j;
  MovePath p;
  p.adjusted_target = y + sign * m;
  for (long long step : {k, k, m0 - j, m0 - j})
    if (step != 0) p.jumps.push_back(sign * step);
  return p;
}

}  // namespace longjump
