#pragma once

#include <span>
#include <vector>

#include "rotation.hpp"
#include "triangular.hpp"

namespace corechase {

// Minimal dense complex matrix, row major.
struct cmat {
  int rows = 0, cols = 0;
  std::vector<cplx> a;

  cmat() = default;
  cmat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, cplx(0.0)) {}
  static cmat identity(int n);

  cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  cplx operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  // this <- this * G for a core at (i, i+1): touches two columns.
  void apply_right(const rotation& g, int i);
  // this <- G * this: touches two rows.
  void apply_left(const rotation& g, int i);

  double frobenius_norm() const;
};

cmat operator*(const cmat& x, const cmat& y);
cmat conj_transpose(const cmat& x);

// Product of embedded core transformations, in sequence order.
cmat dense_from_cores(std::span<const indexed_rotation> seq, int dim);

// Dense (n+1) x (n+1) extension of a factored triangular; the top-left n x n
// block is R itself, the last row is zero up to roundoff.
cmat dense_triangular_extended(const factored_triangular& r);
// The n x n matrix R.
cmat dense_triangular(const factored_triangular& r);

// Companion matrix of a monic polynomial given ascending coefficients
// (a_0, ..., a_{n-1}, 1).
cmat dense_companion(std::span<const cplx> monic_coeffs);

struct francis_options {
  int max_sweeps_per_eigenvalue = 30;
  int exceptional_interval = 15;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

// Eigenvalues of an upper Hessenberg matrix by an unstructured implicitly
// shifted single-shift QR iteration with Wilkinson shifts.  Deliberately
// self-contained: shares no kernels with the factored solvers it cross-checks.
// Capped at dimension 512 to bound test runtime.
std::vector<cplx> dense_francis(cmat h, const francis_options& opts = {});

// || U Ahat U^* - A ||_F.  U must be unitary to ~100 n u.
double matrix_backward_error(const cmat& a, const cmat& u, const cmat& ahat);

}  // namespace corechase
