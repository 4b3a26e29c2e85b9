#pragma once
// Brute-force finite-state oracle: the full rate matrix of the exclusion or
// zero-range process on a tiny torus, with stationarity / detailed-balance /
// entropy-decay checks against the product measures.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "dynamics.hpp"
#include "kernel.hpp"
#include "measures.hpp"

namespace longjump {

struct ExactGenerator {
  Model model = Model::exclusion;
  int n_sites = 0;
  int cap = 1;  // max occupancy per site (1 for exclusion)
  long long n_states = 0;
  // transitions[s] = list of (target state, rate)
  std::vector<std::vector<std::pair<long long, double>>> transitions;
  std::vector<double> out_rate;

  // state <-> occupancy encoding: base (cap+1) digits
  std::vector<int> decode(long long s) const {
    std::vector<int> occ(n_sites);
    for (int x = 0; x < n_sites; ++x) {
      occ[x] = static_cast<int>(s % (cap + 1));
      s /= (cap + 1);
    }
    return occ;
  }

  long long encode(const std::vector<int>& occ) const {
    long long s = 0;
    for (int x = n_sites - 1; x >= 0; --x) s = s * (cap + 1) + occ[x];
    return s;
  }

  // max_s | (mu^T Q)_s | for a probability vector mu
  double stationarity_residual(const std::vector<double>& mu) const {
    std::vector<double> flow(n_states, 0.0);
    for (long long s = 0; s < n_states; ++s) {
      flow[s] -= mu[s] * out_rate[s];
      for (auto& [t, r] : transitions[s]) flow[t] += mu[s] * r;
    }
    double worst = 0.0;
    for (double f : flow) worst = std::max(worst, std::abs(f));
    return worst;
  }

  // max over transitions of | mu_s r(s->t) - mu_t r(t->s) |
  double detailed_balance_violation(const std::vector<double>& mu) const {
    std::unordered_map<std::uint64_t, double> rate_of;
    rate_of.reserve(transitions.size() * 4);
    for (long long s = 0; s < n_states; ++s)
      for (auto& [t, r] : transitions[s])
        rate_of[key(s, t)] += r;
    double worst = 0.0;
    for (long long s = 0; s < n_states; ++s)
      for (auto& [t, r] : transitions[s]) {
        auto it = rate_of.find(key(t, s));
        double rev = (it == rate_of.end()) ? 0.0 : it->second;
        worst = std::max(worst, std::abs(mu[s] * r - mu[t] * rev));
      }
    return worst;
  }

  // distribution at time t by uniformization, truncation error < 1e-13
  std::vector<double> evolve(const std::vector<double>& dist0, double t) const {
    double lambda = 0.0;
    for (double r : out_rate) lambda = std::max(lambda, r);
    if (lambda <= 0.0 || t <= 0.0) return dist0;
    lambda *= 1.05;
    if (lambda * t > 500.0) {
      // keep the Poisson weights representable: split the horizon
      return evolve(evolve(dist0, 0.5 * t), 0.5 * t);
    }
    std::vector<double> acc(n_states, 0.0), cur = dist0, nxt(n_states);
    double lt = lambda * t;
    double w = std::exp(-lt);  // Poisson(lt) weight at k=0
    double wsum = 0.0;
    long long kmax = static_cast<long long>(lt + 60.0 + 12.0 * std::sqrt(lt + 1.0));
    for (long long k = 0;; ++k) {
      if (w > 0.0) {
        for (long long s = 0; s < n_states; ++s) acc[s] += w * cur[s];
        wsum += w;
      }
      if (k >= kmax && wsum > 1.0 - 1e-14) break;
      if (k > kmax + 1000) break;
      // cur <- cur P, P = I + Q/lambda (applied to row vectors)
      for (long long s = 0; s < n_states; ++s)
        nxt[s] = cur[s] * (1.0 - out_rate[s] / lambda);
      for (long long s = 0; s < n_states; ++s)
        for (auto& [tt, r] : transitions[s]) nxt[tt] += cur[s] * r / lambda;
      cur.swap(nxt);
      w *= lt / (k + 1);
    }
    // renormalize the tiny truncated tail
    double total = 0.0;
    for (double v : acc) total += v;
    for (double& v : acc) v /= total;
    return acc;
  }

  // Dirichlet form D(sqrt f) = (1/2) sum_s nu_s sum_{s->t} r (sqrt f_t - sqrt f_s)^2
  double dirichlet_sqrt(const std::vector<double>& dist,
                        const std::vector<double>& ref) const {
    double acc = 0.0;
    for (long long s = 0; s < n_states; ++s) {
      double fs = std::sqrt(dist[s] / ref[s]);
      for (auto& [t, r] : transitions[s]) {
        double ft = std::sqrt(dist[t] / ref[t]);
        acc += ref[s] * r * (ft - fs) * (ft - fs);
      }
    }
    return 0.5 * acc;
  }

  static double relative_entropy(const std::vector<double>& dist,
                                 const std::vector<double>& ref) {
    double H = 0.0;
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] <= 0.0) continue;
      if (ref[s] <= 0.0) return std::numeric_limits<double>::infinity();
      H += dist[s] * std::log(dist[s] / ref[s]);
    }
    return H;
  }

 private:
  std::uint64_t key(long long s, long long t) const {
    return static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(n_states) +
           static_cast<std::uint64_t>(t);
  }
};

// Builds the full rate matrix.  Zero-range transitions that would push a site
// above cap are deleted; the truncated chain stays reversible for the
// truncated product measure (detailed balance holds per transition).
inline ExactGenerator exact_generator(Model model, int N, int cap,
                                      const LatticeKernel& k,
                                      const RateFunction& g = RateFunction::linear()) {
  if (k.grid.dim != 1 || k.grid.n != N)
    throw std::invalid_argument("exact_generator: kernel grid must match N, d=1");
  ExactGenerator gen;
  gen.model = model;
  gen.n_sites = N;
  gen.cap = (model == Model::exclusion) ? 1 : cap;
  double states_f = std::pow(gen.cap + 1.0, N);
  if (states_f > 2e5) throw std::invalid_argument("exact_generator: state space too large");
  gen.n_states = static_cast<long long>(states_f + 0.5);
  gen.transitions.resize(gen.n_states);
  gen.out_rate.assign(gen.n_states, 0.0);

  for (long long s = 0; s < gen.n_states; ++s) {
    auto occ = gen.decode(s);
    for (int x = 0; x < N; ++x) {
      if (occ[x] == 0) continue;
      for (long long z = 1; z < N; ++z) {
        int y = k.grid.wrap(x + z);
        double rate;
        if (model == Model::exclusion) {
          if (occ[y] != 0) continue;
          rate = k.rates[z];
        } else {
          if (occ[y] >= gen.cap) continue;  // truncated
          rate = k.rates[z] * g(occ[x]);
        }
        auto occ2 = occ;
        occ2[x] -= 1;
        occ2[y] += 1;
        gen.transitions[s].emplace_back(gen.encode(occ2), rate);
        gen.out_rate[s] += rate;
      }
    }
  }
  return gen;
}

// same matrix, built from the per-ordered-pair rates p(y-x) eta(x)(1-eta(y))
// instead of "pick particle, reject" — representation-exchangeability oracle
inline ExactGenerator exact_generator_pairwise_exclusion(int N, const LatticeKernel& k) {
  ExactGenerator gen;
  gen.model = Model::exclusion;
  gen.n_sites = N;
  gen.cap = 1;
  gen.n_states = 1LL << N;
  if (gen.n_states > 200000)
    throw std::invalid_argument("exact_generator: state space too large");
  gen.transitions.resize(gen.n_states);
  gen.out_rate.assign(gen.n_states, 0.0);
  for (long long s = 0; s < gen.n_states; ++s) {
    auto occ = gen.decode(s);
    for (int x = 0; x < N; ++x)
      for (int y = 0; y < N; ++y) {
        if (x == y) continue;
        if (!(occ[x] == 1 && occ[y] == 0)) continue;
        long long z = k.grid.diff(x, y);
        auto occ2 = occ;
        occ2[x] = 0;
        occ2[y] = 1;
        gen.transitions[s].emplace_back(gen.encode(occ2), k.rates[z]);
        gen.out_rate[s] += k.rates[z];
      }
  }
  return gen;
}

// product measures on the truncated state space
inline std::vector<double> product_bernoulli_measure(const ExactGenerator& gen,
                                                     double rho) {
  std::vector<double> mu(gen.n_states, 0.0);
  for (long long s = 0; s < gen.n_states; ++s) {
    auto occ = gen.decode(s);
    double p = 1.0;
    for (int o : occ) p *= o ? rho : (1.0 - rho);
    mu[s] = p;
  }
  return mu;
}

// truncated product q_phi(k) proportional to phi^k/g(k)!, k <= cap
inline std::vector<double> product_zr_measure(const ExactGenerator& gen,
                                              const RateFunction& g, double phi) {
  std::vector<double> site(gen.cap + 1);
  site[0] = 1.0;
  for (int kk = 1; kk <= gen.cap; ++kk) site[kk] = site[kk - 1] * phi / g(kk);
  double z = 0.0;
  for (double v : site) z += v;
  for (double& v : site) v /= z;
  std::vector<double> mu(gen.n_states, 0.0);
  for (long long s = 0; s < gen.n_states; ++s) {
    auto occ = gen.decode(s);
    double p = 1.0;
    for (int o : occ) p *= site[o];
    mu[s] = p;
  }
  return mu;
}

struct EntropyTrace {
  std::vector<double> times;
  std::vector<double> H;
  std::vector<double> dirichlet;
};

inline EntropyTrace entropy_decay_trace(const ExactGenerator& gen,
                                        const std::vector<double>& dist0,
                                        const std::vector<double>& ref,
                                        const std::vector<double>& times) {
  for (long long s = 0; s < gen.n_states; ++s)
    if (dist0[s] > 0.0 && ref[s] <= 0.0)
      throw std::invalid_argument("entropy_decay_trace: dist0 not << ref");
  EntropyTrace tr;
  for (double t : times) {
    auto dist = gen.evolve(dist0, t);
    tr.times.push_back(t);
    tr.H.push_back(ExactGenerator::relative_entropy(dist, ref));
    tr.dirichlet.push_back(gen.dirichlet_sqrt(dist, ref));
  }
  return tr;
}

}  // namespace longjump
