#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "companion.hpp"

namespace corechase {

enum class scale_mode {
  standard,  // monic for companion QR, norm for companion QZ
  monic,
  norm,
  none,
};

struct solve_options {
  scale_mode scale = scale_mode::standard;
  int max_sweeps_per_eigenvalue = 30;
  int exceptional_interval = 15;  // stagnant sweeps before a random-phase shift
  std::uint64_t seed = 0x7c0ffee5ull;
  double deflation_tol = unit_roundoff;
  bool accumulate = false;  // dense accumulators, O(n^3); diagnostics only
};

struct solve_diagnostics {
  long sweeps = 0;
  long turnovers = 0;
  double sine_drift_c = 0.0, sine_drift_b = 0.0;    // relative, R factor
  double sine_drift_cw = 0.0, sine_drift_bw = 0.0;  // W factor (pencil solves)
  std::optional<double> matrix_backward_error;      // ||U Ahat U^* - A||_F
  std::optional<double> pencil_backward_error_v;    // ||U Vhat Z^* - V||_F
  std::optional<double> pencil_backward_error_w;
  std::size_t peak_state_bytes = 0;
};

struct solve_result {
  std::vector<cplx> roots;  // degree + stripped zero roots entries
  solve_diagnostics diag;
};

// Absorb the unimodular pair diag(d @ row j, conj(d) @ row j+1), positioned
// between Q_j and Q_{j+1}, into the triangular factor.  Rotations passed on
// the way pick up a phase on their cosine; sines are untouched.
void push_phase_pair(companion_qr_state& st, int j, cplx d);

// Trailing 2x2 of A (or V) restricted to the active block, row major.
std::array<cplx, 4> active_trailing_block(const companion_qr_state& st);

// Eigenvalue of the trailing 2x2 closer to its (2,2) entry; ties break to the
// smaller real part, then the smaller imaginary part.
cplx wilkinson_shift(const std::array<cplx, 4>& trailing);
cplx wilkinson_shift(const companion_qr_state& st);

// One implicit single-shift iteration on the active block: the misfit passes
// through R (two turnovers) and through the Q sequence (one turnover) per
// position, with a fusion at each end.
void qr_sweep(companion_qr_state& st, cplx mu);

// Set every active rotation with |s| <= tol to the exact identity, absorbing
// its unimodular part into R, then recompute the bottom active block.
// Returns the number of rotations deflated.
int detect_deflations(companion_qr_state& st, double tol = unit_roundoff);

// Roots of a fully deflated state: the diagonal of R (phases included).
std::vector<cplx> extract_eigenvalues(const companion_qr_state& st);

solve_result solve_qr(const polynomial& p, const solve_options& opts = {});

}  // namespace corechase
