#pragma once
// Thin FFTW wrapper for the d=1 spectral routes (symbol tables, linear
// propagation, diagonal application of the generator).

#include <complex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "grid.hpp"
#include "kernel.hpp"

namespace longjump {

class RealFFT {
 public:
  explicit RealFFT(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("RealFFT: n must be >= 2");
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    fwd_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(n, out_, in_, FFTW_ESTIMATE);
  }
  ~RealFFT() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFFT(const RealFFT&) = delete;
  RealFFT& operator=(const RealFFT&) = delete;

  int size() const { return n_; }
  int modes() const { return n_ / 2 + 1; }

  std::vector<std::complex<double>> forward(const Field& f) {
    if (static_cast<int>(f.size()) != n_)
      throw std::invalid_argument("RealFFT: size mismatch");
    for (int i = 0; i < n_; ++i) in_[i] = f[i];
    fftw_execute(fwd_);
    std::vector<std::complex<double>> out(modes());
    for (int m = 0; m < modes(); ++m) out[m] = {out_[m][0], out_[m][1]};
    return out;
  }

  Field inverse(const std::vector<std::complex<double>>& c) {
    if (static_cast<int>(c.size()) != modes())
      throw std::invalid_argument("RealFFT: mode count mismatch");
    for (int m = 0; m < modes(); ++m) {
      out_[m][0] = c[m].real();
      out_[m][1] = c[m].imag();
    }
    fftw_execute(bwd_);
    Field f(n_);
    for (int i = 0; i < n_; ++i) f[i] = in_[i] / n_;
    return f;
  }

 private:
  int n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan fwd_, bwd_;
};

// Full symbol table psi_N(m), m = 0..N-1, via one FFT of the rate row (d=1).
inline Field symbol_table(const LatticeKernel& k) {
  if (k.spec.dim != 1)
    throw std::invalid_argument("symbol_table: d=1 only");
  const int n = k.grid.n;
  RealFFT fft(n);
  auto hat = fft.forward(k.rates);
  Field psi(n, 0.0);
  for (int m = 0; m < n; ++m) {
    int mm = (m <= n / 2) ? m : n - m;  // psi(m) = psi(N-m)
    psi[m] = hat[mm].real() - k.p_star;
    if (psi[m] > 0.0) psi[m] = 0.0;  // clamp fp dust at m=0
  }
  return psi;
}

// apply_Ln via the diagonal route: mode m scaled by theta*psi(m).
inline Field apply_Ln_spectral(const LatticeKernel& k, const Field& G, double theta) {
  const int n = k.grid.n;
  require_same_grid(k.grid, G, "apply_Ln_spectral");
  RealFFT fft(n);
  auto hat = fft.forward(G);
  Field psi = symbol_table(k);
  for (int m = 0; m < fft.modes(); ++m) hat[m] *= theta * psi[m];
  return fft.inverse(hat);
}

}  // namespace longjump
