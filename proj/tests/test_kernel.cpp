#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <longjump/fft.hpp>
#include <longjump/kernel.hpp>
#include <longjump/rng.hpp>

using namespace longjump;

namespace {
KernelSpec spec1d(double alpha, double c = 1.0) {
  KernelSpec s;
  s.dim = 1;
  s.alpha = alpha;
  s.c_scale = c;
  return s;
}
}  // namespace

TEST_CASE("kernel spec validation") {
  CHECK_THROWS(spec1d(0.0).validate());
  CHECK_THROWS(spec1d(-1.0).validate());
  CHECK_THROWS(spec1d(2.5).validate());
  CHECK_NOTHROW(spec1d(2.0).validate());
  CHECK_NOTHROW(spec1d(0.3).validate());
  CHECK_THROWS(spec1d(1.0, -1.0).validate());

  KernelSpec d2;
  d2.dim = 2;
  d2.alpha = 1.0;
  CHECK_THROWS(d2.validate());  // angular profile required
  d2.angular = {1.0, 0.2};
  CHECK_NOTHROW(d2.validate());
  d2.angular = {1.0, -2.0};  // goes negative on the angle grid
  CHECK_THROWS(d2.validate());
}

TEST_CASE("profile homogeneity of degree -(1+alpha)") {
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    KernelSpec s = spec1d(alpha, 0.7);
    int z1[1] = {3}, z2[1] = {6};
    CHECK(s.h(z2) / s.h(z1) == Catch::Approx(std::pow(2.0, -(1.0 + alpha))).epsilon(1e-13));
    int zm[1] = {-3};
    CHECK(s.h(zm) == Catch::Approx(s.h(z1)));  // symmetric
  }
}

TEST_CASE("total folded mass matches the full-lattice sum") {
  // alpha = 1: sum_{z != 0} 1/z^2 = pi^2/3, captured up to the fold cutoff
  auto k = build_kernel(spec1d(1.0), 128, 64);
  CHECK(k.p_star == Catch::Approx(std::numbers::pi * std::numbers::pi / 3.0).margin(1e-3));

  // folding only adds mass as the cutoff grows
  auto k0 = build_kernel(spec1d(1.0), 128, 0);
  auto k8 = build_kernel(spec1d(1.0), 128, 8);
  CHECK(k0.p_star < k8.p_star);
  CHECK(k8.p_star < k.p_star);

  // K = 0 equals the direct sum of 1/z^2 over the centered fundamental domain
  double direct = 0.0;
  for (int z = -63; z <= 64; ++z)
    if (z != 0) direct += 1.0 / (double(z) * z);
  CHECK(k0.p_star == Catch::Approx(direct).epsilon(1e-12));
}

TEST_CASE("discrete Levy symbol: sign, symmetry, closed forms") {
  const int N = 64;
  auto k = build_kernel(spec1d(1.0), N);
  CHECK(k.levy_symbol(0) == 0.0);
  for (int m = 1; m < N; ++m) {
    CHECK(k.levy_symbol(m) <= 0.0);
    CHECK(k.levy_symbol(m) == Catch::Approx(k.levy_symbol(N - m)).margin(1e-13));
  }
  // mode N/2: psi = -2 sum_{z odd} p(z) = -pi^2/2 up to fold truncation
  CHECK(k.levy_symbol(N / 2) ==
        Catch::Approx(-std::numbers::pi * std::numbers::pi / 2.0).margin(1e-2));
}

TEST_CASE("jump sampler: determinism and law") {
  const int N = 16;
  auto k = build_kernel(spec1d(1.5), N);
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(k.sample_jump(a) == k.sample_jump(b));

  Rng rng(7);
  const int M = 400000;
  std::vector<long long> counts(N, 0);
  for (int i = 0; i < M; ++i) counts[k.sample_jump(rng)]++;
  CHECK(counts[0] == 0);
  for (int z = 1; z < N; ++z) {
    double p = k.rates[z] / k.p_star;
    double se = std::sqrt(p * (1.0 - p) / M);
    CHECK(std::abs(double(counts[z]) / M - p) < 5.0 * se + 1e-4);
  }
}

TEST_CASE("cosines are eigenfunctions of the discrete generator") {
  const int N = 32;
  const double theta = 100.0;
  auto k = build_kernel(spec1d(1.5), N);
  for (int m : {1, 3, 7}) {
    Field G(N);
    for (int x = 0; x < N; ++x)
      G[x] = std::cos(2.0 * std::numbers::pi * m * x / N);
    Field LG = k.apply_Ln(G, theta);
    double lam = theta * k.levy_symbol(m);
    for (int x = 0; x < N; ++x)
      CHECK(LG[x] == Catch::Approx(lam * G[x]).margin(1e-10 * std::abs(lam)));
  }
}

TEST_CASE("energy form is the exact summation by parts of the generator") {
  const int N = 24;
  auto k = build_kernel(spec1d(1.2), N);
  Rng rng(5);
  Field u(N), v(N);
  for (int i = 0; i < N; ++i) {
    u[i] = rng.uniform();
    v[i] = rng.uniform();
  }
  double n = static_cast<double>(N);
  double theta = std::pow(n, k.spec.alpha);
  Field Lv = k.apply_Ln(v, theta);
  double pairing = 0.0;
  for (int i = 0; i < N; ++i) pairing += u[i] * Lv[i];
  pairing /= n;
  CHECK(k.energy(u, v, n) == Catch::Approx(-pairing).margin(1e-10));
  // symmetry and positivity
  CHECK(k.energy(u, v, n) == Catch::Approx(k.energy(v, u, n)).margin(1e-12));
  CHECK(k.energy(u, u, n) >= 0.0);
}

TEST_CASE("one-point quadratic form of a cosine averages to -theta psi") {
  const int N = 32;
  const double theta = 7.0;
  auto k = build_kernel(spec1d(1.5), N);
  int m = 3;
  Field G(N);
  for (int x = 0; x < N; ++x)
    G[x] = std::cos(2.0 * std::numbers::pi * m * x / N);
  Field Q = k.apply_Qn_one(G, theta);
  double avg = 0.0;
  for (double q : Q) avg += q / N;
  CHECK(avg == Catch::Approx(-theta * k.levy_symbol(m)).margin(1e-10));
}

TEST_CASE("two-point forms reject non-antisymmetric tables") {
  const int N = 6;
  auto k = build_kernel(spec1d(1.0), N);
  std::vector<double> bad(N * N, 1.0);
  CHECK_THROWS(k.apply_Ln_two(bad, 1.0));
  CHECK_THROWS(k.apply_Qn_two(bad, 1.0));
  std::vector<double> good(N * N, 0.0);
  for (int y = 0; y < N; ++y)
    for (int x = 0; x < y; ++x) {
      good[y * N + x] = 0.3 * (y - x);
      good[x * N + y] = -good[y * N + x];
    }
  CHECK_NOTHROW(k.apply_Ln_two(good, 1.0));
}

TEST_CASE("spectral application agrees with the direct generator") {
  const int N = 64;
  auto k = build_kernel(spec1d(1.5), N);
  Rng rng(11);
  Field u(N);
  for (int i = 0; i < N; ++i) u[i] = rng.uniform();
  Field direct = k.apply_Ln(u, 3.0);
  Field spectral = apply_Ln_spectral(k, u, 3.0);
  for (int i = 0; i < N; ++i)
    CHECK(spectral[i] == Catch::Approx(direct[i]).margin(1e-10));
}

TEST_CASE("builder contracts") {
  CHECK_THROWS(build_kernel(spec1d(1.0), 3));
  CHECK_THROWS(build_kernel(spec1d(1.0), 7));
  CHECK_NOTHROW(build_kernel_raw(spec1d(1.0), 3));
  CHECK_NOTHROW(build_kernel(spec1d(1.0), 8));
}

TEST_CASE("two-dimensional kernel is symmetric with finite mass") {
  KernelSpec s;
  s.dim = 2;
  s.alpha = 1.0;
  s.angular = {1.0, 0.3};
  auto k = build_kernel(s, 8, 4);
  CHECK(k.p_star > 0.0);
  const long long S = k.grid.sites();
  for (long long z = 1; z < S; ++z) {
    // p(z) = p(-z)
    int c[8];
    k.grid.coords(z, c);
    int neg[2] = {(8 - c[0]) % 8, (8 - c[1]) % 8};
    long long zn = k.grid.index(neg);
    if (zn == 0) continue;
    CHECK(k.rates[z] == Catch::Approx(k.rates[zn]).margin(1e-13));
  }
}

TEST_CASE("continuum symbol constant") {
  // alpha = 1: 2 int_0^inf (1-cos x)/x^2 dx = pi
  CHECK(continuum_c(1.0, 1.0) == Catch::Approx(std::numbers::pi).margin(1e-8));
  CHECK(continuum_c(1.0, 2.5) == Catch::Approx(2.5 * std::numbers::pi).margin(1e-7));
  // scaling |theta|^alpha
  for (double alpha : {0.7, 1.3, 1.8}) {
    double r = symbol_integral(alpha, 1.0, 2.0) / symbol_integral(alpha, 1.0, 1.0);
    CHECK(r == Catch::Approx(std::pow(2.0, alpha)).margin(1e-6));
  }
  CHECK_THROWS(symbol_integral(2.0, 1.0, 1.0));
}
