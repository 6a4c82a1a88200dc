#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace corechase {

using cplx = std::complex<double>;

// Unit roundoff of IEEE binary64, about 1.1e-16.
inline constexpr double unit_roundoff = 1.1102230246251565e-16;

// Raised when a rotation has drifted off the unit circle beyond what
// renormalization may repair.  This never happens in a healthy run.
class corruption_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An eigenvalue iteration exceeded its sweep budget.
class no_convergence_error : public std::runtime_error {
 public:
  no_convergence_error(const std::string& what, int position_, long sweeps_)
      : std::runtime_error(what), position(position_), sweeps(sweeps_) {}
  int position;
  long sweeps;
};

// A unitary core transformation: the identity matrix with one 2x2 diagonal
// block replaced by
//
//     [ c  -s ]
//     [ s   conj(c) ]
//
// where s is real and |c|^2 + s^2 = 1.  The sine is kept real at all times;
// operations whose natural result has a complex (2,1) entry return the
// unimodular phase that was split off (see fuse).
struct rotation {
  cplx c{1.0, 0.0};
  double s = 0.0;

  bool is_identity() const { return s == 0.0 && c == cplx(1.0, 0.0); }
  double unitarity_defect() const { return std::abs(std::norm(c) + s * s - 1.0); }
};

inline rotation adjoint(const rotation& g) { return {std::conj(g.c), -g.s}; }

// A rotation acting on rows/columns (index, index+1), zero based.
struct indexed_rotation {
  rotation core;
  int index = 0;
};

struct elimination {
  rotation g;  // g^* (x, y)^T = (r, 0)^T
  cplx r;
};

// Builds the rotation eliminating y against x.  Total: make_core(0, 0) is the
// identity with r = 0.  The phase of y is folded into c and r, so s >= 0.
elimination make_core(cplx x, cplx y);

// First-order rescale back onto |c|^2 + s^2 = 1.  The checked variant demands
// a defect below 1e-8 and throws corruption_error otherwise.
inline rotation rescale(const rotation& g) {
  const double w = std::norm(g.c) + g.s * g.s - 1.0;
  const double f = 1.0 - 0.5 * w;
  return {g.c * f, g.s * f};
}
rotation renormalize(const rotation& g);

// The product g*h of two rotations is unitary with unit determinant but in
// general has a complex (2,1) entry.  It is returned factored as
//
//     g*h = core * diag(phase, conj(phase)),
//
// with s(core) = |(g*h)_{21}| >= 0.  The caller owns the phase.
struct fusion {
  rotation core;
  cplx phase;
};
fusion fuse(const rotation& g, const rotation& h);

// Turnover: refactor a product of three rotations in the pattern
//
//     x_j * y_{j+1} * z_j   =   x'_{j+1} * y'_j * z'_{j+1}
//
// in place.  The essentially 3x3 unitary is assembled, its (3,1)/(2,1)
// entries are eliminated to extract the new pair, and the trailing sine is
// produced by the quotient s(x)s(y)/s(y') whenever s(y') is not tiny, which
// conserves the sine products s(x)s(y) = s(y')s(z') and s(y)s(z) = s(x')s(y')
// to high relative accuracy.
void turnover(rotation& x, rotation& y, rotation& z);

// The mirrored pattern x_{j+1} * y_j * z_{j+1} = x'_j * y'_{j+1} * z'_j.
void turnover_mirror(rotation& x, rotation& y, rotation& z);

// Index-checked variant matching the descending-sequence picture: inputs at
// (j, j+1, j), outputs at (j+1, j, j+1), with m_out the ejected misfit.
struct turnover_result {
  indexed_rotation m_out, g_j, g_j1;
};
turnover_result turnover(const indexed_rotation& g_j, const indexed_rotation& g_j1,
                         const indexed_rotation& m_j);

}  // namespace corechase
