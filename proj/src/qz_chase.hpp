#pragma once

#include "qr_chase.hpp"

namespace corechase {

// A diagonal entry of W vanished during extraction.  Preprocessing strips the
// zero leading coefficients that would legitimately cause this, so hitting it
// means the pencil was built from unpreprocessed data.
class infinite_eigenvalue_error : public std::runtime_error {
 public:
  infinite_eigenvalue_error(const std::string& what, int index_)
      : std::runtime_error(what), index(index_) {}
  int index;
};

// Generalized Wilkinson shift: the eigenvalue of the trailing 2x2 of
// (V, W) closer to V(hi,hi)/W(hi,hi).  A singular trailing W block falls
// back to V(hi,hi).
cplx qz_shift(const std::array<cplx, 4>& v2, const std::array<cplx, 4>& w2);
cplx qz_shift(const pencil_state& st);

// Rotation u with u^* q proportional to e_1 for q = (V - mu W) e_lo, which
// has two nonzero entries.  If q vanishes, mu is nudged by u|mu| once.
indexed_rotation qz_initial_core(const pencil_state& st, cplx mu);

// One Moler-Stewart single-shift iteration on the active block; per position
// the misfit crosses W (two turnovers, in adjoint direction), R (two) and the
// Q sequence (one).
void qz_sweep(pencil_state& st, cplx mu);

solve_result solve_qz(const polynomial& p, const solve_options& opts = {});

}  // namespace corechase
