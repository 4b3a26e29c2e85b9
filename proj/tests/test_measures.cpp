#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <longjump/measures.hpp>

using namespace longjump;

TEST_CASE("rate function tables and extensions") {
  auto lin = RateFunction::linear();
  CHECK(lin(0) == 0.0);
  CHECK(lin(5) == 5.0);
  CHECK(lin(1000) == 1000.0);  // linear extension beyond the table
  CHECK(lin.kappa == 1.0);
  CHECK(lin.monotone);

  auto ind = RateFunction::indicator();
  CHECK(ind(0) == 0.0);
  CHECK(ind(1) == 1.0);
  CHECK(ind(17) == 1.0);

  auto cap = RateFunction::capped(3);
  CHECK(cap(2) == 2.0);
  CHECK(cap(3) == 3.0);
  CHECK(cap(50) == 3.0);

  RateFunction bad;
  bad.table = {1.0, 2.0};  // g(0) != 0
  CHECK_THROWS(bad.finalize());
  CHECK_THROWS(lin(-1));
}

TEST_CASE("rate classification") {
  CHECK(classify_rate(RateFunction::linear()).fem);
  auto rc = classify_rate(RateFunction::indicator());
  CHECK_FALSE(rc.fem);
  CHECK(rc.phi_c == Catch::Approx(1.0));
}

TEST_CASE("Poisson thermodynamics: g(n) = n") {
  ThermoFunctions tf(RateFunction::linear());
  CHECK(tf.partition_Z(1.0) == Catch::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(tf.partition_Z(0.0) == 1.0);
  CHECK(tf.density_of_fugacity(0.7) == Catch::Approx(0.7).margin(1e-12));
  CHECK(tf.fugacity_of_density(1.3) == Catch::Approx(1.3).margin(1e-9));
  CHECK(tf.mean_g(2.0) == Catch::Approx(2.0).margin(1e-9));
  CHECK(tf.site_mgf(1.0, 1.0) ==
        Catch::Approx(std::exp(std::exp(1.0) - 1.0)).margin(1e-7));
  // entropy H(a) = a log a - a + 1 around rho_ref = 1
  CHECK(tf.entropy_fn(2.0, 1.0) ==
        Catch::Approx(2.0 * std::log(2.0) - 1.0).margin(1e-8));
  CHECK(tf.entropy_fn(1.0, 1.0) == 0.0);
  CHECK(tf.entropy_fn(0.5, 1.0) ==
        Catch::Approx(0.5 * std::log(0.5) + 0.5).margin(1e-7));
}

TEST_CASE("geometric thermodynamics: g(n) = 1{n>=1}") {
  ThermoFunctions tf(RateFunction::indicator());
  CHECK(tf.partition_Z(0.5) == Catch::Approx(2.0).epsilon(1e-12));
  // rho(phi) = phi/(1-phi)  <=>  phi(rho) = rho/(1+rho)
  CHECK(tf.density_of_fugacity(0.5) == Catch::Approx(1.0).margin(1e-12));
  CHECK(tf.fugacity_of_density(1.0) == Catch::Approx(0.5).margin(1e-9));
  CHECK(tf.fugacity_of_density(0.25) == Catch::Approx(0.2).margin(1e-9));
  CHECK(tf.mean_g(1.0) == Catch::Approx(0.5).margin(1e-9));
  CHECK_THROWS(tf.partition_Z(1.0));  // at the critical fugacity
  double phi = 0.5, th = 0.3;
  CHECK(tf.site_mgf(1.0, th) ==
        Catch::Approx((1.0 - phi) / (1.0 - phi * std::exp(th))).margin(1e-7));
}

TEST_CASE("Legendre duality of the entropy") {
  ThermoFunctions tf(RateFunction::linear());
  for (double a : {0.4, 1.5, 2.0}) {
    CHECK(tf.legendre_entropy(a, 1.0) ==
          Catch::Approx(tf.entropy_fn(a, 1.0)).margin(1e-6));
  }
  ThermoFunctions geo(RateFunction::indicator());
  CHECK(geo.legendre_entropy(1.5, 1.0) ==
        Catch::Approx(geo.entropy_fn(1.5, 1.0)).margin(1e-6));
}

TEST_CASE("fugacity/density round trip and log-convexity of Z") {
  ThermoFunctions tf(RateFunction::indicator());
  for (double rho : {0.1, 0.8, 2.5}) {
    double phi = tf.fugacity_of_density(rho);
    CHECK(tf.density_of_fugacity(phi) == Catch::Approx(rho).margin(1e-8));
  }
  // log Z convex: midpoint below the chord (in log phi)
  ThermoFunctions pois(RateFunction::linear());
  double l1 = std::log(pois.partition_Z(0.5)), l2 = std::log(pois.partition_Z(2.0));
  double lm = std::log(pois.partition_Z(1.0));  // geometric midpoint of 0.5, 2
  CHECK(lm <= 0.5 * (l1 + l2) + 1e-12);
}

TEST_CASE("site marginal: pmf, sampling, quantile coupling") {
  ThermoFunctions tf(RateFunction::linear());
  SiteDist d = tf.site_dist(1.0);  // Poisson(1)
  double fact = 1.0;
  for (std::size_t k = 0; k < std::min<std::size_t>(d.pmf.size(), 8); ++k) {
    if (k > 0) fact *= k;
    CHECK(d.pmf[k] == Catch::Approx(std::exp(-1.0) / fact).margin(1e-10));
  }
  CHECK(d.mean == Catch::Approx(1.0).margin(1e-10));

  Rng rng(3);
  const int M = 200000;
  double mean = 0.0;
  for (int i = 0; i < M; ++i) mean += d.sample(rng);
  mean /= M;
  CHECK(std::abs(mean - 1.0) < 5.0 / std::sqrt(double(M)));

  // shared-uniform coupling dominates sitewise
  SiteDist lo = tf.site_dist(0.5), hi = tf.site_dist(1.5);
  for (int i = 0; i < 20000; ++i) {
    auto [a, b] = monotone_pair_sample(lo, hi, rng);
    CHECK(a <= b);
  }
}

TEST_CASE("profiles and cell averages") {
  Profile st = Profile::step(0.2, 0.6, 0.25, 0.5);
  CHECK(st(0.3) == Catch::Approx(0.8));
  CHECK(st(0.6) == Catch::Approx(0.2));
  CHECK(st(1.3) == Catch::Approx(0.8));  // periodic
  // exact interval integration across the discontinuity
  CHECK(st.cell_average(0.2, 0.3) == Catch::Approx(0.2 + 0.6 * 0.5));
  CHECK(st.cell_average(0.45, 0.55) == Catch::Approx(0.2 + 0.6 * 0.5));

  auto mu = profile_site_means(st, 64, 64);
  double mass = 0.0;
  for (double v : mu) mass += v / 64.0;
  CHECK(mass == Catch::Approx(0.2 + 0.6 * 0.25).margin(1e-12));

  Profile cs = Profile::cosine(1.0, 0.5, 2);
  CHECK(cs(0.0) == Catch::Approx(1.5));
  CHECK(cs(0.25) == Catch::Approx(0.5));
  CHECK(cs(0.5) == Catch::Approx(1.5));
}

TEST_CASE("product measure samplers") {
  Rng rng(9);
  ThermoFunctions tf(RateFunction::linear());
  auto occ = sample_profile_measure_zr(tf, Profile::constant(2.0), 4096, 4096, rng);
  double mean = 0.0;
  for (int o : occ) mean += o;
  mean /= occ.size();
  CHECK(std::abs(mean - 2.0) < 5.0 * std::sqrt(2.0 / 4096.0));

  auto ex = sample_profile_measure_ex(Profile::constant(0.3), 4096, 4096, rng);
  double m2 = 0.0;
  for (int o : ex) {
    CHECK((o == 0 || o == 1));
    m2 += o;
  }
  m2 /= ex.size();
  CHECK(std::abs(m2 - 0.3) < 5.0 * std::sqrt(0.21 / 4096.0));
  CHECK_THROWS(sample_profile_measure_ex(Profile::constant(1.2), 16, 16, rng));
}

TEST_CASE("product relative entropy") {
  ThermoFunctions tf(RateFunction::linear());
  // Poisson sites: per-site entropy u log(u/rho) - u + rho; u=2, rho=1
  std::vector<double> mu(10, 2.0);
  double per_site = 2.0 * std::log(2.0) - 1.0;
  CHECK(product_relative_entropy(tf, mu, 1.0) ==
        Catch::Approx(10.0 * per_site).margin(1e-6));
  // H/N bounded uniformly for a fixed bounded profile, and stable once the
  // two cells straddling each step discontinuity (an O(1/N) contribution)
  // stop mattering
  Profile st = Profile::step(0.5, 1.0, 0.25, 0.5);
  std::vector<double> per_site_h;
  for (int N : {64, 256, 1024}) {
    double h = product_relative_entropy(tf, profile_site_means(st, N, N), 1.0) / N;
    CHECK(h > 0.0);
    CHECK(h < 1.0);
    per_site_h.push_back(h);
  }
  CHECK(std::abs(per_site_h[2] - per_site_h[1]) / per_site_h[1] < 0.01);
  CHECK(std::abs(per_site_h[2] - per_site_h[0]) / per_site_h[0] < 0.05);
}
