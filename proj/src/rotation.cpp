#include "rotation.hpp"

namespace corechase {

namespace {

// The quotient formula for the trailing sine divides by the freshly
// eliminated sine p.  That is safe exactly when p carries relative accuracy,
// i.e. when it was not produced by heavy cancellation; the guard compares p
// against the magnitudes that entered it.  A tiny p from clean products is
// fine (descending C sequences of large-norm polynomials concentrate their
// whole sine product, 1/||a||, in single rotations).
constexpr double cancellation_guard = 100.0;

}  // namespace

elimination make_core(cplx x, cplx y) {
  if (y == cplx(0.0)) {
    if (x == cplx(0.0)) return {rotation{cplx(1.0), 0.0}, cplx(0.0)};
    const double ax = std::abs(x);
    return {rotation{x / ax, 0.0}, cplx(ax)};
  }
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  const double nrm = std::hypot(ax, ay);
  const double s = ay / nrm;
  // c = (x/y)*s written without the possibly overflowing quotient x/y.
  const cplx c = x * std::conj(y) / (ay * nrm);
  const cplx r = (nrm / ay) * y;
  return {rescale(rotation{c, s}), r};
}

rotation renormalize(const rotation& g) {
  const double w = std::norm(g.c) + g.s * g.s - 1.0;
  if (!(std::abs(w) <= 1e-8))
    throw corruption_error("rotation drifted off the unit circle: |c|^2+s^2-1 = " +
                           std::to_string(w));
  const double f = 1.0 - 0.5 * w;
  return {g.c * f, g.s * f};
}

fusion fuse(const rotation& g, const rotation& h) {
  const cplx p11 = g.c * h.c - g.s * h.s;
  const cplx p21 = g.s * h.c + std::conj(g.c) * h.s;
  const double s = std::abs(p21);
  const cplx phase = s > 0.0 ? p21 / s : cplx(1.0);
  return {rescale(rotation{p11 * std::conj(phase), s}), phase};
}

void turnover(rotation& x, rotation& y, rotation& z) {
  const cplx cx = x.c, cy = y.c, cz = z.c;
  const double sx = x.s, sy = y.s, sz = z.s;

  // First two columns of T = x_j y_{j+1} z_j.
  const cplx t11 = cx * cz - sx * cy * sz;
  const cplx t21 = sx * cz + std::conj(cx) * cy * sz;
  const double t31 = sy * sz;
  const cplx t12 = -cx * sz - sx * cy * std::conj(cz);
  const cplx t22 = -sx * sz + std::conj(cx) * cy * std::conj(cz);
  const cplx t32 = sy * std::conj(cz);

  // Eliminate (3,1) then (2,1): the middle core (a, p) first, jointly
  // renormalized; p below is already the final value.
  const double p0 = std::sqrt(std::norm(t21) + t31 * t31);
  const rotation mid = rescale(rotation{t11, p0});
  const double p = mid.s;

  // Misfit and trailing core.  Their sines are the conserved quantities
  // (s(x')s(y') = s(y)s(z) and s(y')s(z') = s(x)s(y) through the corner
  // entries of the 3x3), so they are divided by the final p and left
  // untouched by normalization whenever the cosine dominates; only the
  // cosine absorbs the unitarity defect then.
  cplx m;
  double w;
  cplx b;
  double q;
  if (p > 0.0) {
    m = t21 / p;
    w = t31 / p;
    b = -p * t12 + mid.c * std::conj(m) * t22 + mid.c * w * t32;
    const double entering = std::abs(cx) * std::abs(cy) * std::abs(sz) +
                            std::abs(sx) * std::abs(cz) + std::abs(t31);
    if (entering <= cancellation_guard * p)
      q = sx * sy / p;
    else
      q = std::real(-w * t22 + m * t32);
  } else {
    m = 1.0;
    w = 0.0;
    b = mid.c * t22;  // T = diag(a, conj(a), 1) H' here, so conj(a) b = t22
    q = std::real(t32);
  }

  auto normalize_cosine = [](const rotation& g) {
    // scale only c onto the unit circle; safe while s*s <= 0.5
    const double cc = std::norm(g.c);
    const double defect = cc + g.s * g.s - 1.0;
    return rotation{g.c * (1.0 - 0.5 * defect / cc), g.s};
  };
  x = w * w <= 0.5 ? normalize_cosine(rotation{m, w}) : rescale(rotation{m, w});
  y = mid;
  z = q * q <= 0.5 ? normalize_cosine(rotation{b, q}) : rescale(rotation{b, q});
}

void turnover_mirror(rotation& x, rotation& y, rotation& z) {
  // Conjugating by the order-reversing permutation maps a rotation at the
  // upper position to its adjoint at the lower one and vice versa.
  rotation xf = adjoint(x), yf = adjoint(y), zf = adjoint(z);
  turnover(xf, yf, zf);
  x = adjoint(xf);
  y = adjoint(yf);
  z = adjoint(zf);
}

turnover_result turnover(const indexed_rotation& g_j, const indexed_rotation& g_j1,
                         const indexed_rotation& m_j) {
  if (g_j1.index != g_j.index + 1 || m_j.index != g_j.index)
    throw std::out_of_range("turnover: indices must be (j, j+1, j)");
  const double tol = 1e-8;
  if (g_j.core.unitarity_defect() > tol || g_j1.core.unitarity_defect() > tol ||
      m_j.core.unitarity_defect() > tol)
    throw corruption_error("turnover: input rotation not unitary");
  rotation x = g_j.core, y = g_j1.core, z = m_j.core;
  turnover(x, y, z);
  return {{x, g_j.index + 1}, {y, g_j.index}, {z, g_j.index + 1}};
}

}  // namespace corechase
