#include "dense.hpp"

#include <algorithm>
#include <cmath>

namespace corechase {

cmat cmat::identity(int n) {
  cmat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void cmat::apply_right(const rotation& g, int i) {
  for (int r = 0; r < rows; ++r) {
    const cplx x = (*this)(r, i), y = (*this)(r, i + 1);
    (*this)(r, i) = x * g.c + y * g.s;
    (*this)(r, i + 1) = -x * g.s + y * std::conj(g.c);
  }
}

void cmat::apply_left(const rotation& g, int i) {
  for (int c = 0; c < cols; ++c) {
    const cplx x = (*this)(i, c), y = (*this)(i + 1, c);
    (*this)(i, c) = g.c * x - g.s * y;
    (*this)(i + 1, c) = g.s * x + std::conj(g.c) * y;
  }
}

double cmat::frobenius_norm() const {
  double t = 0.0;
  for (const cplx& v : a) t += std::norm(v);
  return std::sqrt(t);
}

cmat operator*(const cmat& x, const cmat& y) {
  cmat z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const cplx v = x(i, k);
      if (v == cplx(0.0)) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) += v * y(k, j);
    }
  return z;
}

cmat conj_transpose(const cmat& x) {
  cmat z(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) z(j, i) = std::conj(x(i, j));
  return z;
}

cmat dense_from_cores(std::span<const indexed_rotation> seq, int dim) {
  cmat m = cmat::identity(dim);
  for (const indexed_rotation& g : seq) {
    if (g.index < 0 || g.index + 1 >= dim) throw std::out_of_range("dense_from_cores: index");
    m.apply_right(g.core, g.index);
  }
  return m;
}

cmat dense_triangular_extended(const factored_triangular& r) {
  const int n = r.dim();
  const std::vector<cplx> ay = r.recover_alpha_y();
  cmat m(n + 1, n + 1);
  for (int j = 0; j <= n; ++j) {
    const std::vector<cplx> col = r.extended_column(j, ay);
    for (int i = 0; i <= n; ++i) m(i, j) = col[static_cast<size_t>(i)];
  }
  return m;
}

cmat dense_triangular(const factored_triangular& r) {
  const cmat ext = dense_triangular_extended(r);
  cmat m(r.dim(), r.dim());
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m(i, j) = ext(i, j);
  return m;
}

cmat dense_companion(std::span<const cplx> monic_coeffs) {
  const int n = static_cast<int>(monic_coeffs.size()) - 1;
  cmat m(n, n);
  for (int i = 0; i + 1 < n; ++i) m(i + 1, i) = 1.0;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -monic_coeffs[static_cast<size_t>(i)];
  return m;
}

namespace {

// Local Givens elimination; the dense path keeps its own so that it stays an
// independent cross-check of the factored machinery.
struct givens {
  cplx c;
  double s;
};

givens make_givens(cplx x, cplx y) {
  const double ay = std::abs(y);
  if (ay == 0.0) return {1.0, 0.0};
  const double nrm = std::hypot(std::abs(x), ay);
  return {x * std::conj(y) / (ay * nrm), ay / nrm};
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

cplx wilkinson_of_block(cplx h11, cplx h12, cplx h21, cplx h22) {
  const cplx tr = h11 + h22;
  const cplx det = h11 * h22 - h12 * h21;
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  const cplx l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
  const double d1 = std::abs(l1 - h22), d2 = std::abs(l2 - h22);
  if (d1 < d2) return l1;
  if (d2 < d1) return l2;
  // deterministic tie break: smaller real part, then smaller imaginary part
  if (l1.real() != l2.real()) return l1.real() < l2.real() ? l1 : l2;
  return l1.imag() <= l2.imag() ? l1 : l2;
}

}  // namespace

std::vector<cplx> dense_francis(cmat h, const francis_options& opts) {
  const int n = h.rows;
  if (n != h.cols) throw std::invalid_argument("dense_francis: not square");
  if (n > 512) throw std::invalid_argument("dense_francis: capped at n = 512");
  std::vector<cplx> eig(static_cast<size_t>(n));
  if (n == 0) return eig;
  if (n == 1) {
    eig[0] = h(0, 0);
    return eig;
  }

  const double ulp = 2.0 * unit_roundoff;
  const double hnorm = h.frobenius_norm();
  int hi = n - 1;
  long sweeps_on_block = 0;
  std::uint64_t ctr = opts.seed;

  while (hi > 0) {
    // deflate tiny subdiagonals; fall back to the matrix norm when the
    // neighboring diagonal vanishes (companion matrices have zero diagonals)
    for (int k = 0; k < hi; ++k) {
      double local = std::abs(h(k, k)) + std::abs(h(k + 1, k + 1));
      if (local == 0.0) local = hnorm;
      if (std::abs(h(k + 1, k)) <= ulp * local) h(k + 1, k) = 0.0;
    }
    if (h(hi, hi - 1) == cplx(0.0)) {
      eig[static_cast<size_t>(hi)] = h(hi, hi);
      --hi;
      sweeps_on_block = 0;
      continue;
    }
    int lo = hi - 1;
    while (lo > 0 && h(lo, lo - 1) != cplx(0.0)) --lo;

    cplx mu;
    if (sweeps_on_block > 0 && sweeps_on_block % opts.exceptional_interval == 0) {
      const double ang =
          2.0 * 3.14159265358979323846 * (static_cast<double>(mix64(ctr++) >> 11) * 0x1.0p-53);
      mu = h(hi, hi) + (std::abs(h(hi, hi - 1)) + 0.1 * std::abs(h(hi - 1, hi - 1))) *
                           cplx(std::cos(ang), std::sin(ang));
    } else {
      mu = wilkinson_of_block(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    }
    if (++sweeps_on_block > static_cast<long>(opts.max_sweeps_per_eigenvalue) *
                                std::max(1, hi - lo + 1))
      throw no_convergence_error("dense_francis: no convergence", hi, sweeps_on_block);

    // implicit single-shift sweep on [lo, hi]
    cplx x = h(lo, lo) - mu;
    cplx y = h(lo + 1, lo);
    for (int k = lo; k < hi; ++k) {
      const givens g = make_givens(x, y);
      const int c0 = std::max(lo, k - 1);
      for (int j = c0; j <= hi; ++j) {  // rows k, k+1 from the left (G^*)
        const cplx t1 = h(k, j), t2 = h(k + 1, j);
        h(k, j) = std::conj(g.c) * t1 + g.s * t2;
        h(k + 1, j) = -g.s * t1 + g.c * t2;
      }
      const int r1 = std::min(hi, k + 2);
      for (int i = lo; i <= r1; ++i) {  // columns k, k+1 from the right
        const cplx t1 = h(i, k), t2 = h(i, k + 1);
        h(i, k) = t1 * g.c + t2 * g.s;
        h(i, k + 1) = -t1 * g.s + t2 * std::conj(g.c);
      }
      if (k > lo) h(k + 1, k - 1) = 0.0;  // eliminated by construction
      if (k < hi - 1) {
        x = h(k + 1, k);
        y = h(k + 2, k);
      }
    }
  }
  eig[0] = h(0, 0);
  return eig;
}

double matrix_backward_error(const cmat& a, const cmat& u, const cmat& ahat) {
  cmat m = u * ahat * conj_transpose(u);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m(i, j) -= a(i, j);
  return m.frobenius_norm();
}

}  // namespace corechase
