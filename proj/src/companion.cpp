#include "companion.hpp"

#include <cmath>

namespace corechase {

polynomial preprocess(std::span<const cplx> raw) {
  size_t last = raw.size();
  while (last > 0 && raw[last - 1] == cplx(0.0)) --last;
  if (last == 0) throw std::invalid_argument("preprocess: zero polynomial has no roots");
  size_t first = 0;
  while (first < last - 1 && raw[first] == cplx(0.0)) ++first;
  if (last - first == 1 && first == 0)
    throw std::invalid_argument("preprocess: constant polynomial has no roots");

  polynomial p;
  p.coeffs.assign(raw.begin() + static_cast<std::ptrdiff_t>(first),
                  raw.begin() + static_cast<std::ptrdiff_t>(last));
  p.zero_roots = static_cast<int>(first);
  p.stripped_leading = static_cast<int>(raw.size() - last);
  return p;
}

namespace {

std::vector<cplx> monic_spike(std::span<const cplx> a) {
  // Spike of the triangular factor: last column (-a_1, ..., -a_{n-1}, -a_0)
  // of R, matching Q equal to the cyclic shift.
  const size_t n = a.size() - 1;
  std::vector<cplx> t(n);
  for (size_t i = 0; i + 1 < n; ++i) t[i] = -a[i + 1];
  t[n - 1] = -a[0];
  return t;
}

void build_q_and_r(companion_qr_state& st, std::span<const cplx> a) {
  const int n = static_cast<int>(a.size()) - 1;
  st.n = n;
  st.q.assign(static_cast<size_t>(n - 1), rotation{cplx(0.0), 1.0});
  st.r = factored_triangular::from_spike(monic_spike(a));
  // Each flip [[0,1],[1,0]] is the rotation (c=0, s=1) times diag(1,-1); the
  // determinants collect into a single sign on the last companion row.
  if ((n - 1) % 2 == 1) st.r.absorb_left_phase(n - 1, cplx(-1.0));
  st.lo = 0;
  st.hi = n - 1;
  st.initial_sine_product_c = st.r.sine_product_c();
  st.initial_sine_product_b = st.r.sine_product_b();
}

}  // namespace

companion_qr_state build_qr_state(const polynomial& p, bool monicize) {
  const int n = p.degree();
  if (n < 1) throw std::invalid_argument("build_qr_state: degree must be >= 1");
  std::vector<cplx> a = p.coeffs;
  if (monicize) {
    const cplx an = a.back();
    for (cplx& v : a) v /= an;
    a.back() = 1.0;
  }
  companion_qr_state st;
  build_q_and_r(st, a);
  return st;
}

pencil_state build_pencil_state(const polynomial& p, bool norm_scale) {
  const int n = p.degree();
  if (n < 1) throw std::invalid_argument("build_pencil_state: degree must be >= 1");
  std::vector<cplx> a = p.coeffs;
  if (norm_scale) {
    double nrm = 0.0;
    for (const cplx& v : a) nrm += std::norm(v);
    nrm = std::sqrt(nrm);
    for (cplx& v : a) v /= nrm;
  }
  // V from (v_1, ..., v_n) = (a_0, ..., a_{n-1}); W = diag(1, ..., 1, a_n).
  pencil_state st;
  build_q_and_r(st.qr, a);
  std::vector<cplx> tw(static_cast<size_t>(n), cplx(0.0));
  tw[static_cast<size_t>(n) - 1] = a.back();
  st.w = factored_triangular::from_spike(tw);
  return st;
}

cmat dense_state_matrix(const companion_qr_state& st) {
  cmat m = dense_triangular(st.r);
  for (int k = st.n - 2; k >= 0; --k) m.apply_left(st.q[static_cast<size_t>(k)], k);
  return m;
}

std::size_t companion_qr_state::memory_bytes() const {
  return q.capacity() * sizeof(rotation) + r.memory_bytes() + sizeof(*this);
}

std::size_t pencil_state::memory_bytes() const {
  return qr.memory_bytes() + w.memory_bytes() + sizeof(*this);
}

}  // namespace corechase
