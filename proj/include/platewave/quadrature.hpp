// SPDX-License-Identifier: Apache-2.0
//
// Hybrid Gauss-trapezoidal rules (Alpert) for periodic integrands with a
// logarithmic singularity at a grid node t_i:
//
//   int f(t) dt ~ h sum_{A <= |j - i| <= N - A} f(t_j)
//               + h sum_k w_k (f(t_i + x_k h) + f(t_i - x_k h)).
//
// Grid nodes closer than A are dropped and replaced by J auxiliary nodes on
// each side, so the kernel is never evaluated at the singularity. The rule
// of order J is exact for x^p and x^p log x, p < J, at each end; its error
// is O(h^{J+1} log h). Nodes and weights are positive.

#pragma once

#include <cstddef>
#include <span>

namespace platewave {

class AlpertLogRule {
 public:
  struct Node {
    double x;  // offset from the singular node in units of h
    double w;
  };

  /// order in {4, 6, 8, 10, 12, 14, 16}.
  explicit AlpertLogRule(int order = 10);

  int order() const { return order_; }
  /// Grid nodes with periodic index distance below skip() are replaced.
  std::size_t skip() const { return static_cast<std::size_t>(order_) - 1; }
  std::span<const Node> nodes() const { return nodes_; }
  /// Smallest grid size for which the two endpoint corrections do not overlap.
  std::size_t min_nodes() const { return 2 * skip() + 2; }

  /// Periodic index distance between nodes i and j on an N-node grid.
  static std::size_t offset(std::size_t i, std::size_t j, std::size_t n);

 private:
  int order_;
  std::span<const Node> nodes_;
};

/// Weight of grid value j in the trigonometric interpolant at t_i + s h on
/// an even N-node grid (periodic sinc). i and j are grid indices.
double periodic_interp_weight(std::size_t i, std::size_t j, std::size_t n, double s);

}  // namespace platewave
