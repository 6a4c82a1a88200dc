#pragma once

#include <span>
#include <vector>

#include "rotation.hpp"

namespace corechase {

// O(n) representation of an upper triangular unitary-plus-rank-one matrix.
//
// The n x n matrix R is stored through its (n+1) x (n+1) extension with one
// extra row and column,
//
//     Rext = C^* (B D + alpha e_1 y^T),
//
// where C = C_1...C_n and B = B_1...B_n are descending rotation sequences,
// D is a unimodular diagonal and y is never stored: it is determined by the
// requirement that the last row of Rext vanish and can be recovered in O(n).
//
// The diagonal D is where the representation parks unimodular factors that a
// sequence of real-sine rotations cannot carry: the flipped core B_n = C_n Y_n
// of a freshly factored spike has determinant -1, and fusions in a hosting
// chase shed phases through absorb_left_phase.
class factored_triangular {
 public:
  factored_triangular() = default;  // empty; assign from from_spike

  // Factor the triangular matrix with unit diagonal, last column t and
  // trailing diagonal entry t_n, by eliminating the extended spike
  // (t_1, ..., t_n, -1) bottom up.  Any finite spike is representable.
  static factored_triangular from_spike(std::span<const cplx> t);

  int dim() const { return n_; }
  cplx alpha() const { return alpha_; }

  // rho = e_{n+1}^T C^* e_1 = (-1)^n s(C_1)...s(C_n); alpha * rho = -1.
  double rho() const;
  double sine_product_c() const;
  double sine_product_b() const;

  // Refactor R g = g' R' in place, returning g'.  Two turnovers.
  rotation pass_right_to_left(const rotation& g, int i);
  // Refactor g R = R' g' in place, returning g'.  Two turnovers.
  rotation pass_left_to_right(const rotation& g, int i);

  // alpha * y^T, length n+1, from the zero last row of Rext.  Throws
  // corruption_error when |rho| has collapsed below n*u.
  std::vector<cplx> recover_alpha_y() const;

  // R(k, k) in O(1): d_k * s(B_k) / s(C_k).
  cplx diagonal(int k) const;

  // Dense copy of R(k:k+size-1, k:k+size-1), row major, size 1 or 2; O(n).
  std::vector<cplx> diagonal_block(int k, int size) const;

  // Column j of Rext given a precomputed alpha*y; O(n).
  std::vector<cplx> extended_column(int j, std::span<const cplx> alpha_y) const;

  // Absorb diag(..., d at row k, ...) arriving from the left:
  // diag * Rext keeps the factored form with C_k, B_k, D updated in O(1).
  void absorb_left_phase(int k, cplx d);

  // Read-only access for dense assembly and tests.
  const rotation& c_core(int i) const { return c_[static_cast<size_t>(i)]; }
  const rotation& b_core(int i) const { return b_[static_cast<size_t>(i)]; }
  cplx phase(int k) const { return d_[static_cast<size_t>(k)]; }

  std::size_t memory_bytes() const;

 private:
  explicit factored_triangular(int n);

  int n_ = 0;
  std::vector<rotation> c_, b_;  // n cores each, core i on extended rows (i, i+1)
  std::vector<cplx> d_;          // n+1 unimodular diagonal entries
  cplx alpha_{0.0};
};

}  // namespace corechase
