#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dense.hpp"
#include "rotation.hpp"
#include "triangular.hpp"

namespace corechase {

// Coefficients ascending: coeffs[k] multiplies z^k.  After preprocess the
// constant and leading coefficients are nonzero and the degree is >= 1
// (or 0, when the input was c * z^k, in which case only zero roots remain).
struct polynomial {
  std::vector<cplx> coeffs;
  int zero_roots = 0;            // roots at the origin stripped off
  int stripped_leading = 0;      // zero leading coefficients removed
  cplx applied_scale{1.0, 0.0};  // coefficients were divided by this

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Strips exactly-zero leading and constant coefficients.  Throws
// std::invalid_argument for the zero polynomial and for (nonzero) constants,
// which have no roots.
polynomial preprocess(std::span<const cplx> raw);

// The factored companion eigenproblem A = Q R: Q holds n-1 rotations and the
// unimodular leftovers of fusions and deflations live in R's diagonal.  The
// active block is rows [lo, hi], inclusive and zero based; rotations outside
// it are exact identities.
struct companion_qr_state {
  int n = 0;
  std::vector<rotation> q;
  factored_triangular r;
  int lo = 0, hi = 0;
  std::optional<cmat> u_accum;  // accumulated similarity, tests only

  long turnovers = 0;  // instrumented cost counter
  double initial_sine_product_c = 0.0, initial_sine_product_b = 0.0;

  std::size_t memory_bytes() const;
};

// Companion matrix of p in QR-factored form.  With monicize set (the
// default, and the scaling that carries the linear backward-error bound)
// the coefficients are divided by the leading one first.
companion_qr_state build_qr_state(const polynomial& p, bool monicize = true);

// The companion pencil (V, W) = (Q R, W) with the simplest splitting:
// v_1 = a_0, v_{i+1} = a_i, w_i = 0 (i < n), w_n = a_n.  With norm_scale set
// the coefficient vector is divided by its 2-norm first.
struct pencil_state {
  companion_qr_state qr;
  factored_triangular w;
  std::optional<cmat> z_accum;

  std::size_t memory_bytes() const;
};

pencil_state build_pencil_state(const polynomial& p, bool norm_scale = true);

// Dense V = Q R (or A for the matrix case) of the current state; tests only.
cmat dense_state_matrix(const companion_qr_state& st);

}  // namespace corechase
