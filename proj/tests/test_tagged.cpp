#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include <longjump/tagged.hpp>

using namespace longjump;

namespace {
LatticeKernel kern(int N, double alpha = 1.5, double c = 1.0) {
  KernelSpec s;
  s.dim = 1;
  s.alpha = alpha;
  s.c_scale = c;
  return build_kernel(s, N);
}
}  // namespace

TEST_CASE("origin and translation rates") {
  auto g = RateFunction::linear();
  // gbar(n) = n g(n+1)/(n+1) = n for linear g
  CHECK(gbar_rate(g, 0) == 0.0);
  CHECK(gbar_rate(g, 3) == Catch::Approx(3.0));
  // b(n) = g(n)/n = 1, with b(0) := g(1) = 1
  CHECK(b_rate(g, 0) == 1.0);
  CHECK(b_rate(g, 5) == Catch::Approx(1.0));

  auto ind = RateFunction::indicator();
  CHECK(gbar_rate(ind, 2) == Catch::Approx(2.0 / 3.0));
  CHECK(b_rate(ind, 0) == 1.0);
  CHECK(b_rate(ind, 4) == Catch::Approx(0.25));
}

TEST_CASE("lone tagged particle walks with the kernel law") {
  const int N = 32;
  auto k = kern(N, 1.0);
  std::vector<int> zeta0(N, 0);  // empty environment
  TaggedEnvSim sim(k, RateFunction::linear(), zeta0, 1.0, 17);
  // only the translation channel is active, at rate p_star * b(0) = p_star
  CHECK(sim.total_rate() == Catch::Approx(k.p_star));
  auto tr = sim.run_schedule({100.0});
  // jump bookkeeping: X equals the sum of recorded centered displacements
  long long sum = 0;
  for (int z = 1; z < N; ++z)
    sum += sim.jump_counts[z] * k.grid.centered(z);
  CHECK(sum == sim.X);
  // deterministic compensator: b == 1 along the whole path
  CHECK(tr.b_micro.back() == Catch::Approx(100.0).margin(1e-9));
  // event count close to Poisson(p_star * t)
  long long events = sim.clock.events;
  double lam = k.p_star * 100.0;
  CHECK(std::abs(double(events) - lam) < 6.0 * std::sqrt(lam));
}

TEST_CASE("environment-process determinism and conservation") {
  const int N = 16;
  auto k = kern(N);
  Rng init(2);
  ThermoFunctions tf(RateFunction::linear());
  auto zeta0 = sample_palm_env(tf, 1.0, N, init);
  long long mass0 = 0;
  for (int v : zeta0) mass0 += v;
  TaggedEnvSim a(k, RateFunction::linear(), zeta0, 64.0, 5);
  TaggedEnvSim b(k, RateFunction::linear(), zeta0, 64.0, 5);
  a.run_schedule({0.2});
  b.run_schedule({0.2});
  CHECK(a.X == b.X);
  CHECK(a.zeta_arr == b.zeta_arr);
  long long mass1 = 0;
  for (int v : a.zeta_arr) mass1 += v;
  CHECK(mass1 == mass0);
  for (int v : a.zeta_arr) CHECK(v >= 0);
}

TEST_CASE("Palm initial law: size-biased origin") {
  const int N = 8;
  ThermoFunctions tf(RateFunction::linear());
  Rng rng(33);
  double mean0 = 0.0, mean_other = 0.0;
  const int M = 50000;
  for (int i = 0; i < M; ++i) {
    auto z = sample_palm_env(tf, 1.0, N, rng);
    mean0 += z[0];
    mean_other += z[3];
  }
  mean0 /= M;
  mean_other /= M;
  // Poisson(1): size-biased mean = 2, minus the tag -> 1; plain sites -> 1.
  // Distinguish by the variance instead: zeta(0)+1 is size biased, so
  // P(zeta(0)=0) = e^{-1} * ... check the means here.
  CHECK(std::abs(mean0 - 1.0) < 5.0 / std::sqrt(double(M)));
  CHECK(std::abs(mean_other - 1.0) < 5.0 / std::sqrt(double(M)));
}

TEST_CASE("exponential martingale identities") {
  const int N = 64;
  auto k = kern(N, 1.5, 0.02);
  Rng init(6);
  ThermoFunctions tf(RateFunction::linear());
  auto zeta0 = sample_palm_env(tf, 1.0, N, init);
  TaggedEnvSim sim(k, RateFunction::linear(), zeta0, 512.0, 7);
  auto tr = sim.run_schedule({0.05});

  // theta = 0: identically one
  auto m0 = exp_martingale(tr, 0.0, k, N);
  CHECK(m0.back().real() == Catch::Approx(1.0).margin(1e-14));
  CHECK(m0.back().imag() == Catch::Approx(0.0).margin(1e-14));

  // conjugate symmetry in theta
  auto mp = exp_martingale(tr, 20.0, k, N);
  auto mm = exp_martingale(tr, -20.0, k, N);
  CHECK(mm.back().real() == Catch::Approx(mp.back().real()).margin(1e-12));
  CHECK(mm.back().imag() == Catch::Approx(-mp.back().imag()).margin(1e-12));
}

TEST_CASE("exponential martingale has unit mean over replicas") {
  const int N = 64;
  auto k = kern(N, 1.5, 0.02);
  ThermoFunctions tf(RateFunction::linear());
  const int R = 300;
  const double th = 25.0;
  std::vector<std::complex<double>> vals;
  for (int r = 0; r < R; ++r) {
    Rng init(replica_seed(808, r));
    auto zeta0 = sample_palm_env(tf, 1.0, N, init);
    TaggedEnvSim sim(k, RateFunction::linear(), std::move(zeta0), 512.0, init.raw());
    auto tr = sim.run_schedule({0.05});
    vals.push_back(exp_martingale(tr, th, k, N).back());
  }
  std::complex<double> mean = 0.0;
  for (auto& v : vals) mean += v;
  mean /= double(R);
  double vr = 0.0, vi = 0.0;
  for (auto& v : vals) {
    vr += (v.real() - mean.real()) * (v.real() - mean.real());
    vi += (v.imag() - mean.imag()) * (v.imag() - mean.imag());
  }
  double ser = std::sqrt(vr / (R - 1.0) / R), sei = std::sqrt(vi / (R - 1.0) / R);
  CHECK(std::abs(mean.real() - 1.0) <= 4.0 * ser);
  CHECK(std::abs(mean.imag()) <= 4.0 * sei);
}

TEST_CASE("environment and joint constructions give the same tagged law") {
  const int N = 32;
  auto k = kern(N, 1.5, 0.05);
  ThermoFunctions tf(RateFunction::linear());
  const int R = 600;
  const double T = 0.02, theta = std::pow(32.0, 1.5);
  auto stats = [&](auto&& draw) {
    double m = 0.0, v = 0.0;
    std::vector<double> xs;
    for (int r = 0; r < R; ++r) xs.push_back(draw(r));
    for (double x : xs) m += x;
    m /= R;
    for (double x : xs) v += (x - m) * (x - m);
    return std::pair<double, double>(m, v / (R - 1.0));
  };
  auto [m_env, v_env] = stats([&](int r) {
    Rng init(replica_seed(44, r));
    auto zeta0 = sample_palm_env(tf, 1.0, N, init);
    TaggedEnvSim sim(k, RateFunction::linear(), std::move(zeta0), theta, init.raw());
    return double(sim.run_schedule({T}).X.back());
  });
  auto [m_joint, v_joint] = stats([&](int r) {
    Rng init(replica_seed(4444, r));
    auto zeta0 = sample_palm_env(tf, 1.0, N, init);
    std::vector<int> occ(zeta0.begin(), zeta0.end());
    occ[0] += 1;  // the tag itself
    JointTaggedSim sim(k, RateFunction::linear(), std::move(occ), 0, theta,
                       init.raw());
    sim.run_until(T);
    return double(sim.X);
  });
  double se_mean = std::sqrt(v_env / R + v_joint / R);
  CHECK(std::abs(m_env - m_joint) <= 4.0 * se_mean);
  // variances comparable (law equality, loose 4-sigma-ish bound via log ratio)
  CHECK(std::abs(std::log(v_env / v_joint)) < 4.0 * std::sqrt(2.0 / (R - 1.0)) * 2.0);
}

TEST_CASE("empirical characteristic function on degenerate samples") {
  std::vector<double> zeros(50, 0.0);
  auto cf = empirical_cf(zeros, {1.0, 5.0});
  for (auto& p : cf) {
    CHECK(p.re == Catch::Approx(1.0));
    CHECK(p.im == Catch::Approx(0.0).margin(1e-15));
    CHECK(p.se_re == Catch::Approx(0.0).margin(1e-12));
  }
  CHECK_THROWS(empirical_cf({}, {1.0}));
}
