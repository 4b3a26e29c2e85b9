#pragma once
// Dynamic weighted sampling over a fixed number of slots: O(log n) update and
// draw.  Used for zero-range site selection (weight = g(occupancy)).

#include <cassert>
#include <cstddef>
#include <vector>

namespace longjump {

class SumTree {
 public:
  explicit SumTree(std::size_t n = 0) { resize(n); }

  void resize(std::size_t n) {
    n_ = n;
    leaves_ = 1;
    while (leaves_ < n_) leaves_ <<= 1;
    if (leaves_ == 0) leaves_ = 1;
    tree_.assign(2 * leaves_, 0.0);
  }

  std::size_t size() const { return n_; }

  double get(std::size_t i) const { return tree_[leaves_ + i]; }

  void set(std::size_t i, double w) {
    std::size_t node = leaves_ + i;
    tree_[node] = w;
    for (node >>= 1; node >= 1; node >>= 1)
      tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
  }

  void add(std::size_t i, double dw) { set(i, tree_[leaves_ + i] + dw); }

  double total() const { return tree_[1]; }

  // Find the slot containing cumulative weight target in [0, total()).
  std::size_t sample(double target) const {
    std::size_t node = 1;
    while (node < leaves_) {
      node <<= 1;
      if (target >= tree_[node]) {
        target -= tree_[node];
        ++node;
      }
    }
    std::size_t idx = node - leaves_;
    if (idx >= n_) idx = n_ - 1;  // guard against fp edge at total()
    while (idx > 0 && tree_[leaves_ + idx] <= 0.0) --idx;
    return idx;
  }

  // Recompute internal sums from the leaves (fp drift repair).
  void rebuild() {
    for (std::size_t node = leaves_ - 1; node >= 1; --node)
      tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
  }

 private:
  std::size_t n_ = 0;
  std::size_t leaves_ = 1;
  std::vector<double> tree_;
};

}  // namespace longjump
