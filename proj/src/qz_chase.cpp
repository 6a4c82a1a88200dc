#include "qz_chase.hpp"

#include <cmath>
#include <limits>

namespace corechase {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t v) { return static_cast<double>(v >> 11) * 0x1.0p-53; }

}  // namespace

namespace {

struct shift_candidates {
  cplx near, far;  // relative to the trailing Rayleigh quotient
  bool degenerate = false;
};

shift_candidates qz_candidates(const std::array<cplx, 4>& v, const std::array<cplx, 4>& w) {
  // det(V2 - lambda W2) = A lambda^2 + B lambda + C, solved stably.
  const cplx qa = w[0] * w[3] - w[1] * w[2];
  const cplx qb = -(v[0] * w[3] + v[3] * w[0] - v[1] * w[2] - v[2] * w[1]);
  const cplx qc = v[0] * v[3] - v[1] * v[2];
  const cplx whh = w[3];
  const cplx target = std::abs(whh) > 0.0 ? v[3] / whh : v[3];
  if (std::abs(qa) == 0.0) return {v[3], v[3], true};  // singular trailing W block
  const cplx disc = std::sqrt(qb * qb - 4.0 * qa * qc);
  const cplx q1 = 0.5 * (-qb + disc), q2 = 0.5 * (-qb - disc);
  const cplx q = std::abs(q1) >= std::abs(q2) ? q1 : q2;
  if (std::abs(q) == 0.0) return {target, target, true};
  const cplx l1 = q / qa, l2 = qc / q;
  const double a1 = std::abs(l1), a2 = std::abs(l2);
  // wildly split pair: go after the small eigenvalue first (see
  // wilkinson_shift for the reasoning)
  if (std::min(a1, a2) < 1e-2 * std::max(a1, a2))
    return a1 < a2 ? shift_candidates{l1, l2} : shift_candidates{l2, l1};
  const double d1 = std::abs(l1 - target), d2 = std::abs(l2 - target);
  if (d1 < d2) return {l1, l2};
  if (d2 < d1) return {l2, l1};
  if (l1.real() != l2.real()) return l1.real() < l2.real() ? shift_candidates{l1, l2}
                                                           : shift_candidates{l2, l1};
  return l1.imag() <= l2.imag() ? shift_candidates{l1, l2} : shift_candidates{l2, l1};
}

shift_candidates qz_candidates(const pencil_state& st) {
  const int hi = st.qr.hi;
  const std::vector<cplx> wb = st.w.diagonal_block(hi - 1, 2);
  return qz_candidates(active_trailing_block(st.qr), {wb[0], wb[1], wb[2], wb[3]});
}

}  // namespace

cplx qz_shift(const std::array<cplx, 4>& v, const std::array<cplx, 4>& w) {
  return qz_candidates(v, w).near;
}

cplx qz_shift(const pencil_state& st) {
  if (st.qr.hi - st.qr.lo < 1) throw std::invalid_argument("qz_shift: active block too small");
  return qz_candidates(st).near;
}

indexed_rotation qz_initial_core(const pencil_state& st, cplx mu) {
  const int lo = st.qr.lo;
  if (st.qr.hi - lo < 1) throw std::invalid_argument("qz_initial_core: active block too small");
  const cplx rll = st.qr.r.diagonal(lo);
  const cplx wll = st.w.diagonal(lo);
  cplx q1 = st.qr.q[static_cast<size_t>(lo)].c * rll - mu * wll;
  cplx q2 = st.qr.q[static_cast<size_t>(lo)].s * rll;
  if (q1 == cplx(0.0) && q2 == cplx(0.0)) {
    mu += unit_roundoff * std::abs(mu);
    q1 = st.qr.q[static_cast<size_t>(lo)].c * rll - mu * wll;
    if (q1 == cplx(0.0) && q2 == cplx(0.0))
      throw corruption_error("qz_initial_core: (V - mu W) e_lo vanished");
  }
  return {make_core(q1, q2).g, lo};
}

void qz_sweep(pencil_state& st, cplx mu) {
  companion_qr_state& qr = st.qr;
  const int lo = qr.lo, hi = qr.hi;
  if (lo >= hi) throw std::invalid_argument("qz_sweep: active block too small");

  const rotation u1 = qz_initial_core(st, mu).core;
  if (qr.u_accum) qr.u_accum->apply_right(u1, lo);
  {
    const fusion f = fuse(adjoint(u1), qr.q[static_cast<size_t>(lo)]);
    qr.q[static_cast<size_t>(lo)] = f.core;
    push_phase_pair(qr, lo, f.phase);
  }

  rotation mis = u1;
  int i = lo;
  for (;;) {
    if (mis.unitarity_defect() > 1e-8)
      throw corruption_error("qz_sweep: misfit drifted off the unit circle");
    // Through W^{-1} from the right, executed as the adjoint pass through W:
    // W^{-1} u = z W'^{-1}  <=>  u^* W = W' z^*.
    const rotation z = adjoint(st.w.pass_left_to_right(adjoint(mis), i));
    qr.turnovers += 2;
    if (st.z_accum) st.z_accum->apply_right(z, i);
    mis = qr.r.pass_right_to_left(z, i);
    qr.turnovers += 2;
    if (i == hi - 1) {
      const fusion f = fuse(qr.q[static_cast<size_t>(i)], mis);
      qr.q[static_cast<size_t>(i)] = f.core;
      push_phase_pair(qr, i, f.phase);
      break;
    }
    rotation x = qr.q[static_cast<size_t>(i)], y = qr.q[static_cast<size_t>(i) + 1], zz = mis;
    turnover(x, y, zz);
    qr.q[static_cast<size_t>(i)] = y;
    qr.q[static_cast<size_t>(i) + 1] = zz;
    mis = x;
    qr.turnovers += 1;
    ++i;
    if (qr.u_accum) qr.u_accum->apply_right(mis, i);
  }
}

solve_result solve_qz(const polynomial& p, const solve_options& opts) {
  solve_result res;
  const int n = p.degree();
  if (n == 0) {
    res.roots.assign(static_cast<size_t>(p.zero_roots), cplx(0.0));
    return res;
  }
  if (n == 1) {
    res.roots.assign(static_cast<size_t>(p.zero_roots), cplx(0.0));
    res.roots.push_back(-p.coeffs[0] / p.coeffs[1]);
    return res;
  }

  bool norm_scale = opts.scale == scale_mode::standard || opts.scale == scale_mode::norm;
  polynomial q = p;
  if (opts.scale == scale_mode::monic) {
    const cplx an = q.coeffs.back();
    for (cplx& v : q.coeffs) v /= an;
    q.coeffs.back() = 1.0;
  }
  pencil_state st = build_pencil_state(q, norm_scale);
  const double w_scale = std::abs(st.w.alpha());  // ~ ||W||
  cmat v0, w0;
  if (opts.accumulate) {
    st.qr.u_accum = cmat::identity(n);
    st.z_accum = cmat::identity(n);
    v0 = dense_state_matrix(st.qr);
    w0 = dense_triangular(st.w);
  }
  res.diag.peak_state_bytes = st.memory_bytes();

  const double init_cw = st.w.sine_product_c(), init_bw = st.w.sine_product_b();

  std::uint64_t ctr = opts.seed;
  int since_deflation = 0;
  int stalled = 0;
  double prev_sine = 2.0;
  detect_deflations(st.qr, opts.deflation_tol);
  while (st.qr.hi > st.qr.lo) {
    // Shift ladder as in solve_qr: Wilkinson while the bottom sine shrinks,
    // then windows going after the smaller trailing eigenvalue (resolves
    // stalls where a huge eigenvalue sits over a tiny triangular diagonal
    // entry), then a random kick.
    cplx mu;
    const int window = std::max(1, opts.exceptional_interval / 3);
    if (stalled > 0 && stalled % opts.exceptional_interval == 0) {
      const std::array<cplx, 4> t = active_trailing_block(st.qr);
      const cplx whh = st.w.diagonal(st.qr.hi);
      const double ang = two_pi * uniform01(mix64(ctr++));
      mu = (t[3] + (std::abs(t[2]) + 0.1 * std::abs(t[0])) * cplx(std::cos(ang), std::sin(ang)));
      if (std::abs(whh) > 0.0) mu /= whh;
    } else if ((stalled / window) % 2 == 1) {
      const shift_candidates cand = qz_candidates(st);
      mu = std::abs(cand.near) <= std::abs(cand.far) ? cand.near : cand.far;
    } else {
      mu = qz_shift(st);
    }
    qz_sweep(st, mu);
    ++res.diag.sweeps;
    ++since_deflation;
    const double sine = std::abs(st.qr.q[static_cast<size_t>(st.qr.hi) - 1].s);
    if (sine > 0.5 * prev_sine) ++stalled;
    prev_sine = sine;
    if (detect_deflations(st.qr, opts.deflation_tol) > 0) {
      since_deflation = 0;
      stalled = 0;
      prev_sine = 2.0;
    }
    // pooled budget, as in solve_qr
    if (res.diag.sweeps > static_cast<long>(opts.max_sweeps_per_eigenvalue) * n ||
        since_deflation > 3 * opts.max_sweeps_per_eigenvalue)
      throw no_convergence_error("solve_qz: sweep budget exhausted at row " +
                                     std::to_string(st.qr.hi),
                                 st.qr.hi, res.diag.sweeps);
  }

  res.roots.assign(static_cast<size_t>(p.zero_roots), cplx(0.0));
  const std::vector<cplx> vdiag = extract_eigenvalues(st.qr);
  for (int k = 0; k < n; ++k) {
    const cplx wkk = st.w.diagonal(k);
    // A tiny W diagonal is a legitimate large root; only a vanished or
    // underflowed entry (a_n = 0 slipped past preprocessing) is infinite.
    if (std::abs(wkk) < 1e16 * std::numeric_limits<double>::min() * w_scale)
      throw infinite_eigenvalue_error("solve_qz: infinite eigenvalue at index " +
                                          std::to_string(k),
                                      k);
    res.roots.push_back(vdiag[static_cast<size_t>(k)] / wkk);
  }

  res.diag.turnovers = st.qr.turnovers;
  res.diag.sine_drift_c =
      std::abs(st.qr.r.sine_product_c() / st.qr.initial_sine_product_c - 1.0);
  res.diag.sine_drift_b =
      std::abs(st.qr.r.sine_product_b() / st.qr.initial_sine_product_b - 1.0);
  res.diag.sine_drift_cw = std::abs(st.w.sine_product_c() / init_cw - 1.0);
  res.diag.sine_drift_bw = std::abs(st.w.sine_product_b() / init_bw - 1.0);
  if (opts.accumulate) {
    const cmat zs = conj_transpose(*st.z_accum);
    cmat dv = *st.qr.u_accum * dense_state_matrix(st.qr) * zs;
    cmat dw = *st.qr.u_accum * dense_triangular(st.w) * zs;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        dv(i, j) -= v0(i, j);
        dw(i, j) -= w0(i, j);
      }
    res.diag.pencil_backward_error_v = dv.frobenius_norm();
    res.diag.pencil_backward_error_w = dw.frobenius_norm();
  }
  return res;
}

}  // namespace corechase
