#include "triangular.hpp"

#include <cstddef>
#include <limits>

namespace corechase {

factored_triangular::factored_triangular(int n)
    : n_(n),
      c_(static_cast<size_t>(n)),
      b_(static_cast<size_t>(n)),
      d_(static_cast<size_t>(n) + 1, cplx(1.0)) {}

factored_triangular factored_triangular::from_spike(std::span<const cplx> t) {
  const int n = static_cast<int>(t.size());
  if (n < 1) throw std::invalid_argument("from_spike: empty spike");
  factored_triangular f(n);

  // Eliminate the extended spike (t, -1) bottom up; each stored C_k applies
  // as-is (not its adjoint) to the spike, so it is the adjoint of the
  // eliminator returned by make_core.
  cplx r(-1.0);
  for (int k = n - 1; k >= 0; --k) {
    elimination e = make_core(t[static_cast<size_t>(k)], r);
    f.c_[static_cast<size_t>(k)] = adjoint(e.g);
    r = e.r;
  }
  f.alpha_ = r;

  for (int k = 0; k + 1 < n; ++k) f.b_[static_cast<size_t>(k)] = f.c_[static_cast<size_t>(k)];

  // B_n = C_n * [[0,1],[1,0]] has determinant -1; split it into a rotation
  // and a diagonal remainder kept in D.
  const rotation cn = f.c_[static_cast<size_t>(n - 1)];
  const double ac = std::abs(cn.c);
  const cplx ph = ac > 0.0 ? cn.c / ac : cplx(1.0);
  f.b_[static_cast<size_t>(n - 1)] = rescale(rotation{-cn.s * ph, ac});
  f.d_[static_cast<size_t>(n - 1)] *= std::conj(ph);
  f.d_[static_cast<size_t>(n)] *= -ph;
  return f;
}

double factored_triangular::rho() const {
  double p = (n_ % 2 == 0) ? 1.0 : -1.0;
  for (const rotation& g : c_) p *= g.s;
  return p;
}

double factored_triangular::sine_product_c() const {
  double p = 1.0;
  for (const rotation& g : c_) p *= g.s;
  return p;
}

double factored_triangular::sine_product_b() const {
  double p = 1.0;
  for (const rotation& g : b_) p *= g.s;
  return p;
}

rotation factored_triangular::pass_right_to_left(const rotation& g, int i) {
  if (i < 0 || i >= n_ - 1) throw std::out_of_range("pass_right_to_left: index");
  const size_t k = static_cast<size_t>(i);
  // Commute the incoming core through D, then one turnover into B and one
  // through the adjoint pair of C.  The rank-one part needs no update.
  rotation mis{g.c * d_[k] * std::conj(d_[k + 1]), g.s};
  std::swap(d_[k], d_[k + 1]);
  {
    // B_i B_{i+1} mis  =  mis~ B'_i B'_{i+1}
    rotation x = b_[k], y = b_[k + 1], z = mis;
    turnover(x, y, z);
    mis = x;
    b_[k] = y;
    b_[k + 1] = z;
  }
  // C*_{i+1} C*_i mis~  =  out C'*_{i+1} C'*_i
  rotation x = adjoint(c_[k + 1]), y = adjoint(c_[k]), z = mis;
  turnover_mirror(x, y, z);
  c_[k + 1] = adjoint(y);
  c_[k] = adjoint(z);
  return x;
}

rotation factored_triangular::pass_left_to_right(const rotation& g, int i) {
  if (i < 0 || i >= n_ - 1) throw std::out_of_range("pass_left_to_right: index");
  const size_t k = static_cast<size_t>(i);
  // g C*_{i+1} C*_i  =  C'*_{i+1} C'*_i mis
  rotation x = g, y = adjoint(c_[k + 1]), z = adjoint(c_[k]);
  turnover(x, y, z);
  c_[k + 1] = adjoint(x);
  c_[k] = adjoint(y);
  {
    // mis B_i B_{i+1}  =  B'_i B'_{i+1} out
    rotation bx = z, by = b_[k], bz = b_[k + 1];
    turnover_mirror(bx, by, bz);
    b_[k] = bx;
    b_[k + 1] = by;
    z = bz;
  }
  rotation out{z.c * d_[k] * std::conj(d_[k + 1]), z.s};
  std::swap(d_[k], d_[k + 1]);
  return out;
}

std::vector<cplx> factored_triangular::recover_alpha_y() const {
  const size_t m = static_cast<size_t>(n_) + 1;
  // v = e_{n+1}^T C^*; spreads upward one row per adjoint core.
  std::vector<cplx> v(m, cplx(0.0));
  v[m - 1] = 1.0;
  for (int k = n_ - 1; k >= 0; --k) {
    const rotation& g = c_[static_cast<size_t>(k)];
    // row vector times the adjoint of the embedded core at (k, k+1)
    const cplx v1 = v[static_cast<size_t>(k)], v2 = v[static_cast<size_t>(k) + 1];
    v[static_cast<size_t>(k)] = v1 * std::conj(g.c) - v2 * g.s;
    v[static_cast<size_t>(k) + 1] = v1 * g.s + v2 * g.c;
  }
  // rho = -1/alpha stays relatively accurate no matter how small it is (the
  // turnover conserves the sine product), so only a vanished or underflowed
  // value signals a broken representation.
  const cplx rho_v = v[0];
  if (std::abs(rho_v) < static_cast<double>(n_) * 1e16 * std::numeric_limits<double>::min())
    throw corruption_error("recover_alpha_y: representation is numerically singular");
  // w = v B D
  std::vector<cplx>& w = v;
  for (int k = 0; k < n_; ++k) {
    const rotation& g = b_[static_cast<size_t>(k)];
    const cplx w1 = w[static_cast<size_t>(k)], w2 = w[static_cast<size_t>(k) + 1];
    w[static_cast<size_t>(k)] = w1 * g.c + w2 * g.s;
    w[static_cast<size_t>(k) + 1] = -w1 * g.s + w2 * std::conj(g.c);
  }
  const cplx f = -1.0 / rho_v;
  for (size_t k = 0; k < m; ++k) w[k] *= f * d_[k];
  return w;
}

cplx factored_triangular::diagonal(int k) const {
  const size_t i = static_cast<size_t>(k);
  return d_[i] * (b_[i].s / c_[i].s);
}

std::vector<cplx> factored_triangular::extended_column(int j,
                                                       std::span<const cplx> alpha_y) const {
  const size_t m = static_cast<size_t>(n_) + 1;
  std::vector<cplx> col(m, cplx(0.0));
  col[static_cast<size_t>(j)] = d_[static_cast<size_t>(j)];
  // B picks the column up from row j and spreads it upward.
  for (int k = std::min(j, n_ - 1); k >= 0; --k) {
    const rotation& g = b_[static_cast<size_t>(k)];
    const cplx x1 = col[static_cast<size_t>(k)], x2 = col[static_cast<size_t>(k) + 1];
    col[static_cast<size_t>(k)] = g.c * x1 - g.s * x2;
    col[static_cast<size_t>(k) + 1] = g.s * x1 + std::conj(g.c) * x2;
  }
  col[0] += alpha_y[static_cast<size_t>(j)];
  // Apply C^* = C_n^* ... C_1^*, innermost factor first.
  for (int k = 0; k < n_; ++k) {
    const rotation& g = c_[static_cast<size_t>(k)];
    const cplx x1 = col[static_cast<size_t>(k)], x2 = col[static_cast<size_t>(k) + 1];
    col[static_cast<size_t>(k)] = std::conj(g.c) * x1 + g.s * x2;
    col[static_cast<size_t>(k) + 1] = -g.s * x1 + g.c * x2;
  }
  return col;
}

std::vector<cplx> factored_triangular::diagonal_block(int k, int size) const {
  if (size != 1 && size != 2) throw std::out_of_range("diagonal_block: size must be 1 or 2");
  if (k < 0 || k + size > n_) throw std::out_of_range("diagonal_block: index");
  std::vector<cplx> out(static_cast<size_t>(size * size), cplx(0.0));
  if (size == 1) {
    out[0] = diagonal(k);
    return out;
  }
  const std::vector<cplx> ay = recover_alpha_y();
  const std::vector<cplx> c1 = extended_column(k + 1, ay);
  // Diagonal entries through the O(1) formula: the assembled columns carry
  // absolute noise around u ||alpha|| that can swamp a tiny diagonal.
  out[0] = diagonal(k);
  out[1] = c1[static_cast<size_t>(k)];
  out[2] = 0.0;  // triangular by construction
  out[3] = diagonal(k + 1);
  return out;
}

void factored_triangular::absorb_left_phase(int k, cplx d) {
  if (k < 0 || k >= n_) throw std::out_of_range("absorb_left_phase: row");
  const size_t i = static_cast<size_t>(k);
  // diag(d @ row k) C^* = C'^* diag(d @ row k+1) with C'_k = (conj(d) c, s);
  // the residual then crosses B_k the same way and lands in D at row k.
  c_[i].c *= std::conj(d);
  b_[i].c *= std::conj(d);
  d_[i] *= d;
}

std::size_t factored_triangular::memory_bytes() const {
  return c_.capacity() * sizeof(rotation) + b_.capacity() * sizeof(rotation) +
         d_.capacity() * sizeof(cplx) + sizeof(*this);
}

}  // namespace corechase
