#include "qr_chase.hpp"

#include <cmath>

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

void fuse_left(companion_qr_state& st, const rotation& u, int j) {
  const fusion f = fuse(adjoint(u), st.q[static_cast<size_t>(j)]);
  st.q[static_cast<size_t>(j)] = f.core;
  push_phase_pair(st, j, f.phase);
}

void fuse_right(companion_qr_state& st, const rotation& x, int j) {
  const fusion f = fuse(st.q[static_cast<size_t>(j)], x);
  st.q[static_cast<size_t>(j)] = f.core;
  push_phase_pair(st, j, f.phase);
}

}  // namespace

void push_phase_pair(companion_qr_state& st, int j, cplx d) {
  st.r.absorb_left_phase(j, d);
  const cplx w = std::conj(d);
  int row = j + 1;
  while (row <= st.n - 2 && st.q[static_cast<size_t>(row)].s != 0.0) {
    st.q[static_cast<size_t>(row)].c *= w;
    ++row;
  }
  st.r.absorb_left_phase(row, w);
}

std::array<cplx, 4> active_trailing_block(const companion_qr_state& st) {
  const int hi = st.hi;
  const std::vector<cplx> ay = st.r.recover_alpha_y();
  std::vector<cplx> col0 = st.r.extended_column(hi - 1, ay);
  std::vector<cplx> col1 = st.r.extended_column(hi, ay);
  for (int k = st.hi - 1; k >= st.lo; --k) {
    const rotation& g = st.q[static_cast<size_t>(k)];
    for (std::vector<cplx>* col : {&col0, &col1}) {
      const cplx x = (*col)[static_cast<size_t>(k)], y = (*col)[static_cast<size_t>(k) + 1];
      (*col)[static_cast<size_t>(k)] = g.c * x - g.s * y;
      (*col)[static_cast<size_t>(k) + 1] = g.s * x + std::conj(g.c) * y;
    }
  }
  // The assembled columns carry absolute noise on the order of u ||a|| times
  // the sine-product attenuation, which can swamp a tiny subdiagonal entry
  // and with it the shift.  Structurally A(hi, hi-1) = s(Q_{hi-1}) R(hi-1,
  // hi-1) with one rounding, so use that instead of the assembled value.
  const cplx subdiag = st.q[static_cast<size_t>(hi) - 1].s * st.r.diagonal(hi - 1);
  return {col0[static_cast<size_t>(hi) - 1], col1[static_cast<size_t>(hi) - 1], subdiag,
          col1[static_cast<size_t>(hi)]};
}

std::pair<cplx, cplx> eigenvalues_2x2(const std::array<cplx, 4>& t) {
  const cplx tr = t[0] + t[3];
  const cplx det = t[0] * t[3] - t[1] * t[2];
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  // larger root by the stable branch, companion root through the determinant
  const cplx s1 = 0.5 * (tr + disc), s2 = 0.5 * (tr - disc);
  const cplx big = std::abs(s1) >= std::abs(s2) ? s1 : s2;
  if (std::abs(big) == 0.0) return {cplx(0.0), cplx(0.0)};
  return {big, det / big};
}

cplx wilkinson_shift(const std::array<cplx, 4>& t) {
  const auto [l1, l2] = eigenvalues_2x2(t);
  const double a1 = std::abs(l1), a2 = std::abs(l2);
  // On a wildly split trailing pair, peel the small eigenvalue off first:
  // letting the huge one converge onto a tiny triangular diagonal leaves a
  // sine that cannot fall to the deflation tolerance.
  if (std::min(a1, a2) < 1e-2 * std::max(a1, a2)) return a1 < a2 ? l1 : l2;
  const double d1 = std::abs(l1 - t[3]), d2 = std::abs(l2 - t[3]);
  if (d1 < d2) return l1;
  if (d2 < d1) return l2;
  if (l1.real() != l2.real()) return l1.real() < l2.real() ? l1 : l2;
  return l1.imag() <= l2.imag() ? l1 : l2;
}

cplx wilkinson_shift(const companion_qr_state& st) {
  if (st.hi - st.lo < 1) throw std::invalid_argument("wilkinson_shift: active block too small");
  return wilkinson_shift(active_trailing_block(st));
}

void qr_sweep(companion_qr_state& st, cplx mu) {
  const int lo = st.lo, hi = st.hi;
  if (lo >= hi) throw std::invalid_argument("qr_sweep: active block too small");

  // q = (A - mu I) e_lo has two nonzero entries, both multiples of R(lo,lo).
  const cplx rll = st.r.diagonal(lo);
  const rotation u1 = make_core(st.q[static_cast<size_t>(lo)].c * rll - mu,
                                st.q[static_cast<size_t>(lo)].s * rll)
                          .g;
  if (st.u_accum) st.u_accum->apply_right(u1, lo);
  fuse_left(st, u1, lo);

  rotation mis = u1;
  int i = lo;
  for (;;) {
    if (mis.unitarity_defect() > 1e-8)
      throw corruption_error("qr_sweep: misfit drifted off the unit circle");
    mis = st.r.pass_right_to_left(mis, i);
    st.turnovers += 2;
    if (i == hi - 1) {
      fuse_right(st, mis, i);
      break;
    }
    rotation x = st.q[static_cast<size_t>(i)], y = st.q[static_cast<size_t>(i) + 1], z = mis;
    turnover(x, y, z);
    st.q[static_cast<size_t>(i)] = y;
    st.q[static_cast<size_t>(i) + 1] = z;
    mis = x;
    st.turnovers += 1;
    ++i;
    if (st.u_accum) st.u_accum->apply_right(mis, i);
  }
}

int detect_deflations(companion_qr_state& st, double tol) {
  int count = 0;
  for (int k = st.lo; k < st.hi; ++k) {
    rotation& g = st.q[static_cast<size_t>(k)];
    // a sweep can hand back an exactly diagonal core (s == 0, c != 1);
    // that is a deflation too, not an already-absorbed identity
    if (!g.is_identity() && std::abs(g.s) <= tol) {
      const cplx d = g.c / std::abs(g.c);
      g = rotation{};
      push_phase_pair(st, k, d);
      ++count;
    }
  }
  while (st.hi > 0 && st.q[static_cast<size_t>(st.hi) - 1].is_identity()) --st.hi;
  if (st.hi == 0) {
    st.lo = 0;
    return count;
  }
  int lo = st.hi - 1;
  while (lo > 0 && !st.q[static_cast<size_t>(lo) - 1].is_identity()) --lo;
  st.lo = lo;
  return count;
}

std::vector<cplx> extract_eigenvalues(const companion_qr_state& st) {
  for (const rotation& g : st.q)
    if (g.s != 0.0) throw std::invalid_argument("extract_eigenvalues: state not fully deflated");
  std::vector<cplx> roots(static_cast<size_t>(st.n));
  for (int k = 0; k < st.n; ++k) roots[static_cast<size_t>(k)] = st.r.diagonal(k);
  return roots;
}

namespace {

cplx exceptional_shift(const companion_qr_state& st, std::uint64_t& ctr) {
  const std::array<cplx, 4> t = active_trailing_block(st);
  const double ang = two_pi * uniform01(mix64(ctr++));
  return t[3] + (std::abs(t[2]) + 0.1 * std::abs(t[0])) * cplx(std::cos(ang), std::sin(ang));
}

// Anti-stall shift: the smaller trailing eigenvalue.  When eigenvalues of
// wildly different magnitude meet at the bottom of the block, converging the
// larger one can park it over a tiny triangular diagonal entry whose sine no
// longer represents a meaningful coupling; peeling off the small eigenvalue
// first gets past this.  Magnitude is a stable target across sweeps.
cplx alternate_shift(const companion_qr_state& st) {
  const auto [l1, l2] = eigenvalues_2x2(active_trailing_block(st));
  return std::abs(l1) <= std::abs(l2) ? l1 : l2;
}

}  // namespace

solve_result solve_qr(const polynomial& p, const solve_options& opts) {
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

  const bool monicize = opts.scale != scale_mode::none;
  companion_qr_state st = build_qr_state(p, monicize);
  cmat a0;
  if (opts.accumulate) {
    st.u_accum = cmat::identity(n);
    a0 = dense_state_matrix(st);
  }
  res.diag.peak_state_bytes = st.memory_bytes();

  std::uint64_t ctr = opts.seed;
  int since_deflation = 0;  // sweeps since the last deflation (hard budget)
  int stalled = 0;          // sweeps in which the bottom sine failed to shrink
  double prev_sine = 2.0;
  detect_deflations(st, opts.deflation_tol);
  while (st.hi > st.lo) {
    // Shift ladder: Wilkinson while the bottom sine keeps shrinking; once it
    // stalls, windows targeting the smaller trailing eigenvalue; a
    // random-phase kick at each full exceptional interval.
    cplx mu;
    const int window = std::max(1, opts.exceptional_interval / 3);
    if (stalled > 0 && stalled % opts.exceptional_interval == 0)
      mu = exceptional_shift(st, ctr);
    else if ((stalled / window) % 2 == 1)
      mu = alternate_shift(st);
    else
      mu = wilkinson_shift(st);
    qr_sweep(st, mu);
    ++res.diag.sweeps;
    ++since_deflation;
    const double sine = std::abs(st.q[static_cast<size_t>(st.hi) - 1].s);
    if (sine > 0.5 * prev_sine) ++stalled;
    prev_sine = sine;
    if (detect_deflations(st, opts.deflation_tol) > 0) {
      since_deflation = 0;
      stalled = 0;
      prev_sine = 2.0;
    }
    // The per-eigenvalue budget is pooled over the whole solve in the usual
    // LAPACK manner; a single stretch without any deflation gets three times
    // the per-eigenvalue allowance before the solve gives up.
    if (res.diag.sweeps > static_cast<long>(opts.max_sweeps_per_eigenvalue) * n ||
        since_deflation > 3 * opts.max_sweeps_per_eigenvalue)
      throw no_convergence_error("solve_qr: sweep budget exhausted at row " +
                                     std::to_string(st.hi),
                                 st.hi, res.diag.sweeps);
  }

  res.roots.assign(static_cast<size_t>(p.zero_roots), cplx(0.0));
  const std::vector<cplx> lam = extract_eigenvalues(st);
  res.roots.insert(res.roots.end(), lam.begin(), lam.end());

  res.diag.turnovers = st.turnovers;
  res.diag.sine_drift_c =
      std::abs(st.r.sine_product_c() / st.initial_sine_product_c - 1.0);
  res.diag.sine_drift_b =
      std::abs(st.r.sine_product_b() / st.initial_sine_product_b - 1.0);
  if (opts.accumulate)
    res.diag.matrix_backward_error =
        matrix_backward_error(a0, *st.u_accum, dense_state_matrix(st));
  return res;
}

}  // namespace corechase
