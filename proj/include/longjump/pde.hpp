#pragma once
// Cauchy solvers for du/dt = L u and du/dt = L phi(u) on the periodic grid,
// using the exact discrete symbol shared with the simulator, plus the
// entropy / energy / Fisher functionals evaluated on solutions.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "fft.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "measures.hpp"
#include "rng.hpp"

namespace longjump {

// ---- flux phi(u) --------------------------------------------------------

struct Flux {
  std::function<double(double)> f;
  double kappa = 1.0;  // Lipschitz constant
  double operator()(double u) const { return f(u); }

  static Flux identity() { return {[](double u) { return u; }, 1.0}; }
};

// Monotone cubic Hermite table of phi(rho) built from the thermodynamic
// functions; refined until the midpoint interpolation error is < 1e-8.
inline Flux make_table_flux(const ThermoFunctions& tf, double rho_max) {
  int M = 129;
  for (;;) {
    auto grid = std::make_shared<std::vector<double>>(M);
    auto vals = std::make_shared<std::vector<double>>(M);
    auto slopes = std::make_shared<std::vector<double>>(M);
    double h = rho_max / (M - 1);
    for (int i = 0; i < M; ++i) {
      (*grid)[i] = i * h;
      (*vals)[i] = tf.fugacity_of_density((*grid)[i]);
    }
    // Fritsch–Carlson monotone slopes
    std::vector<double> d(M - 1);
    for (int i = 0; i < M - 1; ++i) d[i] = ((*vals)[i + 1] - (*vals)[i]) / h;
    (*slopes)[0] = d[0];
    (*slopes)[M - 1] = d[M - 2];
    for (int i = 1; i < M - 1; ++i)
      (*slopes)[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (int i = 0; i < M - 1; ++i) {
      if (d[i] == 0.0) { (*slopes)[i] = (*slopes)[i + 1] = 0.0; continue; }
      double a = (*slopes)[i] / d[i], b = (*slopes)[i + 1] / d[i];
      double s = a * a + b * b;
      if (s > 9.0) {
        double t = 3.0 / std::sqrt(s);
        (*slopes)[i] = t * a * d[i];
        (*slopes)[i + 1] = t * b * d[i];
      }
    }
    auto eval = [grid, vals, slopes, h, M, rho_max](double u) {
      if (u <= 0.0) return 0.0;
      if (u >= rho_max) {
        double sl = (*slopes)[M - 1];
        return (*vals)[M - 1] + sl * (u - rho_max);
      }
      int i = static_cast<int>(u / h);
      if (i >= M - 1) i = M - 2;
      double t = (u - (*grid)[i]) / h;
      double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
      double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
      return h00 * (*vals)[i] + h * h10 * (*slopes)[i] + h01 * (*vals)[i + 1] +
             h * h11 * (*slopes)[i + 1];
    };
    // validate at interval midpoints
    double worst = 0.0;
    for (int i = 0; i < M - 1; ++i) {
      double mid = ((*grid)[i] + (*grid)[i + 1]) * 0.5;
      worst = std::max(worst, std::abs(eval(mid) - tf.fugacity_of_density(mid)));
    }
    if (worst < 1e-8 || M > 100000) {
      double kappa = 0.0;
      for (double s : *slopes) kappa = std::max(kappa, std::abs(s));
      return {eval, std::max(kappa, tf.rate.kappa)};
    }
    M = 2 * (M - 1) + 1;
  }
}

// entropy table: a -> H(a) = int_{rho_ref}^a log(phi(x)/phi(rho_ref)) dx
inline std::function<double(double)> make_entropy_table(const ThermoFunctions& tf,
                                                        double rho_ref,
                                                        double umax) {
  const int M = 4097;
  auto grid = std::make_shared<std::vector<double>>(M);
  auto vals = std::make_shared<std::vector<double>>(M);
  double h = umax / (M - 1);
  std::vector<double> logphi(M);
  for (int i = 0; i < M; ++i) {
    (*grid)[i] = i * h;
    double x = std::max((*grid)[i], 1e-12);
    logphi[i] = std::log(tf.fugacity_of_density(x));
  }
  double lref = std::log(tf.fugacity_of_density(rho_ref));
  // cumulative trapezoid of logphi - lref, then shift so H(rho_ref)=0
  (*vals)[0] = 0.0;
  for (int i = 1; i < M; ++i)
    (*vals)[i] = (*vals)[i - 1] + 0.5 * h * (logphi[i - 1] + logphi[i] - 2.0 * lref);
  // interpolate the offset at rho_ref
  auto raw = [grid, vals, h, M](double u) {
    if (u <= 0.0) return (*vals)[0];
    int i = static_cast<int>(u / h);
    if (i >= M - 1) i = M - 2;
    double t = (u - (*grid)[i]) / h;
    return (1 - t) * (*vals)[i] + t * (*vals)[i + 1];
  };
  double off = raw(rho_ref);
  return [raw, off](double u) { return raw(u) - off; };
}

// ---- operator and solvers ----------------------------------------------

struct SpectralOperator {
  const LatticeKernel* kernel = nullptr;
  double theta = 1.0;
  Field psi;  // full symbol table, size N

  int n() const { return kernel->grid.n; }
};

inline SpectralOperator make_operator(const LatticeKernel& k, double theta) {
  if (k.spec.dim != 1)
    throw std::invalid_argument("spectral operator: d=1 only");
  SpectralOperator op;
  op.kernel = &k;
  op.theta = theta;
  op.psi = symbol_table(k);
  return op;
}

struct PDEState {
  Field u;
  double t = 0.0;
};

inline PDEState linear_solve(const Field& u0, double T, const SpectralOperator& op) {
  require_same_grid(op.kernel->grid, u0, "linear_solve");
  RealFFT fft(op.n());
  auto hat = fft.forward(u0);
  for (int m = 0; m < fft.modes(); ++m)
    hat[m] *= std::exp(T * op.theta * op.psi[m]);
  return {fft.inverse(hat), T};
}

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0, min = 0.0, max = 0.0;
  double entropy = 0.0, energy = 0.0, fisher = 0.0;
};

// raw Fisher double sum: sum_{x,z} p(z) (phi(x+z)-phi(x))^2 / (phi(x)+phi(x+z))
inline double fisher_sum(const LatticeKernel& k, const Field& phi_field) {
  const long long S = k.grid.sites();
  double acc = 0.0;
  for (long long x = 0; x < S; ++x)
    for (long long z = 1; z < S; ++z) {
      long long y = k.grid.shift(x, z);
      double den = phi_field[x] + phi_field[y];
      if (den <= 0.0) continue;
      double d = phi_field[y] - phi_field[x];
      acc += k.rates[z] * d * d / den;
    }
  return acc;
}

struct SolveOptions {
  double safety = 0.25;
  std::vector<double> record_times;  // diagnostics schedule (always includes T)
  std::function<double(double)> entropy_of;  // per-density entropy H(a)
  bool collect_diagnostics = false;
};

struct SolveResult {
  PDEState state;
  std::vector<DiagnosticsRow> trace;
  double dt_used = 0.0;
  long long steps = 0;
};

inline DiagnosticsRow diagnose(const Field& u, double t, const SpectralOperator& op,
                               const Flux& phi, const SolveOptions& opt) {
  DiagnosticsRow row;
  row.t = t;
  const long long S = op.kernel->grid.sites();
  row.min = u[0];
  row.max = u[0];
  for (double v : u) {
    row.mass += v;
    row.min = std::min(row.min, v);
    row.max = std::max(row.max, v);
  }
  Field pf(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) pf[i] = phi(u[i]);
  row.energy = op.kernel->energy(pf, pf, static_cast<double>(op.n()));
  row.fisher = fisher_sum(*op.kernel, pf);
  if (opt.entropy_of) {
    double acc = 0.0;
    for (double v : u) acc += opt.entropy_of(v);
    row.entropy = acc / static_cast<double>(S);
  }
  return row;
}

// Method of lines for du/dt = L_theta phi(u): phi pointwise, L spectral,
// classic RK4 with dt = safety/(2 theta p* kappa), halving on max-principle
// or positivity violations.
inline SolveResult nonlinear_solve(const Field& u0, double T,
                                   const SpectralOperator& op, const Flux& phi,
                                   SolveOptions opt = {}) {
  require_same_grid(op.kernel->grid, u0, "nonlinear_solve");
  const int N = op.n();
  RealFFT fft(N);
  auto apply_L = [&](const Field& v) {
    Field pv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) pv[i] = phi(v[i]);
    auto hat = fft.forward(pv);
    for (int m = 0; m < fft.modes(); ++m) hat[m] *= op.theta * op.psi[m];
    return fft.inverse(hat);
  };

  double u_lo = u0[0], u_hi = u0[0];
  for (double v : u0) { u_lo = std::min(u_lo, v); u_hi = std::max(u_hi, v); }
  const double range = std::max(u_hi - u_lo, 1e-30);
  const double mp_tol = 1e-9 * std::max(1.0, u_hi);

  SolveResult res;
  res.state.u = u0;
  res.state.t = 0.0;
  double dt = opt.safety / (2.0 * op.theta * op.kernel->p_star * phi.kappa);
  res.dt_used = dt;

  std::vector<double> rec = opt.record_times;
  if (opt.collect_diagnostics) {
    if (rec.empty() || rec.back() < T) rec.push_back(T);
    res.trace.push_back(diagnose(res.state.u, 0.0, op, phi, opt));
  }
  std::size_t ri = 0;

  auto rk4_step = [&](const Field& u, double h) {
    Field k1 = apply_L(u);
    Field tmp(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
    Field k2 = apply_L(tmp);
    for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
    Field k3 = apply_L(tmp);
    for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + h * k3[i];
    Field k4 = apply_L(tmp);
    Field out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  };

  while (res.state.t < T - 1e-15 * T) {
    double target = T;
    if (opt.collect_diagnostics && ri < rec.size())
      target = std::min(target, rec[ri]);
    double h = std::min(dt, target - res.state.t);
    Field next = rk4_step(res.state.u, h);
    // monitor positivity and the maximum principle
    double lo = next[0], hi = next[0];
    for (double v : next) { lo = std::min(lo, v); hi = std::max(hi, v); }
    bool bad = hi > u_hi + mp_tol || lo < u_lo - mp_tol;
    if (u_lo <= mp_tol && lo < 0.0 && lo > -1e-12 * std::max(u_hi, 1.0)) {
      for (double& v : next) v = std::max(v, 0.0);  // roundoff clip only
      bad = hi > u_hi + mp_tol;
    }
    if (bad) {
      dt *= 0.5;
      res.dt_used = dt;
      if (dt < 1e-12 * T)
        throw std::runtime_error("nonlinear_solve: dt underflow (stiffness)");
      continue;
    }
    res.state.u = std::move(next);
    res.state.t += h;
    ++res.steps;
    if (opt.collect_diagnostics && ri < rec.size() &&
        res.state.t >= rec[ri] - 1e-15) {
      res.trace.push_back(diagnose(res.state.u, res.state.t, op, phi, opt));
      ++ri;
    }
  }
  return res;
}

// ---- variational Fisher functional -------------------------------------

struct FisherCheck {
  double closed_form = 0.0;    // (1/4) * fisher_sum
  double value_at_maximizer = 0.0;
  double best_trial = 0.0;     // max over random perturbations of F*
};

// Functional J(G) = sum_{x,y} p(y-x) (phi(y)-phi(x)) G(y,x)
//                 - sum_{x,y} p(y-x) (phi(x)+phi(y)) G(y,x)^2
// over antisymmetric G; maximized by F*(y,x) = (1/2)(phi(y)-phi(x))/(phi(x)+phi(y)).
inline FisherCheck variational_fisher_check(const Field& phi_field,
                                            const LatticeKernel& k, int trials,
                                            Rng& rng, double eps = 1e-2) {
  const long long S = k.grid.sites();
  require_same_grid(k.grid, phi_field, "variational_fisher_check");
  for (double v : phi_field)
    if (!(v > 0.0))
      throw std::invalid_argument("variational_fisher_check: phi must be positive");

  auto J = [&](const std::vector<double>& G) {
    double lin = 0.0, quad = 0.0;
    for (long long x = 0; x < S; ++x)
      for (long long z = 1; z < S; ++z) {
        long long y = k.grid.shift(x, z);
        double g = G[y * S + x];
        lin += k.rates[z] * (phi_field[y] - phi_field[x]) * g;
        quad += k.rates[z] * (phi_field[x] + phi_field[y]) * g * g;
      }
    return lin - quad;
  };

  std::vector<double> F(S * S, 0.0);
  for (long long y = 0; y < S; ++y)
    for (long long x = 0; x < S; ++x)
      F[y * S + x] = 0.5 * (phi_field[y] - phi_field[x]) /
                     (phi_field[x] + phi_field[y]);

  FisherCheck out;
  out.closed_form = 0.25 * fisher_sum(k, phi_field);
  out.value_at_maximizer = J(F);
  out.best_trial = -std::numeric_limits<double>::infinity();
  std::vector<double> trial(S * S);
  for (int t = 0; t < trials; ++t) {
    // random antisymmetric perturbation
    for (long long y = 0; y < S; ++y)
      for (long long x = 0; x < y; ++x) {
        double hshift = 2.0 * rng.uniform() - 1.0;
        trial[y * S + x] = F[y * S + x] + eps * hshift;
        trial[x * S + y] = -trial[y * S + x];
      }
    for (long long x = 0; x < S; ++x) trial[x * S + x] = 0.0;
    out.best_trial = std::max(out.best_trial, J(trial));
  }
  return out;
}

// ---- contraction / comparison ------------------------------------------

struct ContractionReport {
  double l1_initial = 0.0, l1_final = 0.0;
  double l2_initial = 0.0, l2_final = 0.0;
  double max_order_violation = 0.0;  // max(u_a - u_b) at T when u0_a <= u0_b
};

inline ContractionReport contraction_check(const Field& u0a, const Field& u0b,
                                           double T, const SpectralOperator& op,
                                           const Flux& phi) {
  SolveOptions opt;
  auto ra = nonlinear_solve(u0a, T, op, phi, opt);
  auto rb = nonlinear_solve(u0b, T, op, phi, opt);
  ContractionReport rep;
  const double N = static_cast<double>(u0a.size());
  for (std::size_t i = 0; i < u0a.size(); ++i) {
    rep.l1_initial += std::abs(u0a[i] - u0b[i]) / N;
    rep.l2_initial += (u0a[i] - u0b[i]) * (u0a[i] - u0b[i]) / N;
    double d = ra.state.u[i] - rb.state.u[i];
    rep.l1_final += std::abs(d) / N;
    rep.l2_final += d * d / N;
    rep.max_order_violation = std::max(rep.max_order_violation, d);
  }
  return rep;
}

}  // namespace longjump
