#pragma once
// Periodic lattice bookkeeping shared by the simulator and the solver.
// Sites are flat-indexed; coordinates live in {0,..,N-1}^d with the centered
// representative used for displacements.

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace longjump {

struct Torus {
  int dim = 1;
  int n = 0;  // sites per axis

  long long sites() const {
    long long s = 1;
    for (int k = 0; k < dim; ++k) s *= n;
    return s;
  }

  int wrap(long long c) const {
    long long r = c % n;
    if (r < 0) r += n;
    return static_cast<int>(r);
  }

  // centered representative of coordinate i in {0..n-1}: in (-n/2, n/2]
  int centered(int i) const { return (i <= n / 2) ? i : i - n; }

  void coords(long long idx, int* out) const {
    for (int k = 0; k < dim; ++k) {
      out[k] = static_cast<int>(idx % n);
      idx /= n;
    }
  }

  long long index(const int* c) const {
    long long idx = 0;
    for (int k = dim - 1; k >= 0; --k) idx = idx * n + wrap(c[k]);
    return idx;
  }

  // flat index of site + displacement (displacement given as flat index of a
  // torus point; adds coordinatewise mod n)
  long long shift(long long site, long long disp) const {
    if (dim == 1) {
      long long t = site + disp;
      if (t >= n) t -= n;
      return t;
    }
    int a[8], b[8], c[8];
    coords(site, a);
    coords(disp, b);
    for (int k = 0; k < dim; ++k) c[k] = a[k] + b[k];
    return index(c);
  }

  // flat index of the displacement b - a (mod n per axis)
  long long diff(long long a, long long b) const {
    if (dim == 1) {
      long long d = b - a;
      if (d < 0) d += n;
      return d;
    }
    int ca[8], cb[8], c[8];
    coords(a, ca);
    coords(b, cb);
    for (int k = 0; k < dim; ++k) c[k] = cb[k] - ca[k];
    return index(c);
  }

  bool operator==(const Torus& o) const { return dim == o.dim && n == o.n; }
};

using Field = std::vector<double>;

inline void require_same_grid(const Torus& g, const Field& f, const char* what) {
  if (static_cast<long long>(f.size()) != g.sites())
    throw std::invalid_argument(std::string(what) + ": field size does not match grid");
}

}  // namespace longjump
