#include "experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>

#include "dd.hpp"
#include "dense.hpp"
#include "qz_chase.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace corechase {

std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + counter * 0x9e3779b97f4a7c15ull + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double counter_uniform01(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(counter_rng(seed, counter) >> 11) * 0x1.0p-53;
}

std::vector<cplx> random_poly(int degree, int rho, std::uint64_t seed) {
  if (degree < 1) throw std::invalid_argument("random_poly: degree must be >= 1");
  std::vector<cplx> a(static_cast<size_t>(degree) + 1);
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (int k = 0; k <= degree; ++k) {
    const std::uint64_t base = 3ull * static_cast<std::uint64_t>(k);
    const double nu = counter_uniform01(seed, base);
    const double mu = counter_uniform01(seed, base + 1);
    const double eta = counter_uniform01(seed, base + 2);
    const double mod = std::abs(2.0 * mu - 1.0) * std::pow(10.0, rho * (2.0 * eta - 1.0));
    a[static_cast<size_t>(k)] = mod * cplx(std::cos(two_pi * nu), std::sin(two_pi * nu));
  }
  return a;
}

namespace {

using ddpoly = std::vector<ddcplx>;  // ascending coefficients

ddpoly multiply(const ddpoly& p, const ddpoly& q) {
  ddpoly r(p.size() + q.size() - 1);
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = 0; j < q.size(); ++j) r[i + j] = r[i + j] + p[i] * q[j];
  return r;
}

}  // namespace

std::vector<cplx> coeffs_from_roots(std::span<const cplx> roots) {
  if (roots.empty()) throw std::invalid_argument("coeffs_from_roots: no roots");
  std::vector<ddpoly> level;
  level.reserve(roots.size());
  for (const cplx& r : roots) level.push_back({ddcplx(-r), ddcplx(cplx(1.0))});
  // balanced pairwise product tree
  while (level.size() > 1) {
    std::vector<ddpoly> next;
    next.reserve((level.size() + 1) / 2);
    for (size_t i = 0; i + 1 < level.size(); i += 2)
      next.push_back(multiply(level[i], level[i + 1]));
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  std::vector<cplx> a(level[0].size());
  for (size_t i = 0; i < a.size(); ++i) {
    a[i] = level[0][i].to_cplx();
    if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag()))
      throw std::overflow_error("coeffs_from_roots: coefficient overflow");
  }
  a.back() = 1.0;
  return a;
}

backward_error coefficient_backward_error(std::span<const cplx> a,
                                          std::span<const cplx> roots) {
  const std::vector<cplx> at = coeffs_from_roots(roots);
  if (at.size() != a.size())
    throw std::invalid_argument("coefficient_backward_error: size mismatch");
  backward_error be;
  double d = 0.0, nt = 0.0;
  cplx dot(0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    d += std::norm(a[i] - at[i]);
    nt += std::norm(at[i]);
    dot += std::conj(at[i]) * a[i];
  }
  be.delta_a = std::sqrt(d);
  be.gamma = dot / nt;
  double ds = 0.0;
  for (size_t i = 0; i < a.size(); ++i) ds += std::norm(a[i] - be.gamma * at[i]);
  be.delta_a_scaled = std::sqrt(ds);
  return be;
}

namespace {

// Perfect matching within a distance threshold, by augmenting paths.
bool feasible(const std::vector<double>& dist, int n, double thr, std::vector<int>& match_y) {
  std::vector<int> match_x(static_cast<size_t>(n), -1);
  match_y.assign(static_cast<size_t>(n), -1);
  std::vector<char> seen;
  auto augment = [&](auto&& self, int x) -> bool {
    for (int y = 0; y < n; ++y) {
      if (seen[static_cast<size_t>(y)] || dist[static_cast<size_t>(x) * n + y] > thr) continue;
      seen[static_cast<size_t>(y)] = 1;
      if (match_y[static_cast<size_t>(y)] < 0 || self(self, match_y[static_cast<size_t>(y)])) {
        match_y[static_cast<size_t>(y)] = x;
        match_x[static_cast<size_t>(x)] = y;
        return true;
      }
    }
    return false;
  };
  for (int x = 0; x < n; ++x) {
    seen.assign(static_cast<size_t>(n), 0);
    if (!augment(augment, x)) return false;
  }
  return true;
}

}  // namespace

double matched_distance(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) throw std::invalid_argument("matched_distance: size mismatch");
  const int n = static_cast<int>(x.size());
  if (n == 0) return 0.0;
  std::vector<double> dist(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dist[static_cast<size_t>(i) * n + j] = std::abs(x[static_cast<size_t>(i)] -
                                                      y[static_cast<size_t>(j)]);
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  // binary search the smallest feasible threshold
  int lo = 0, hi = static_cast<int>(sorted.size()) - 1;
  std::vector<int> match;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (feasible(dist, n, sorted[static_cast<size_t>(mid)], match))
      hi = mid;
    else
      lo = mid + 1;
  }
  return sorted[static_cast<size_t>(lo)];
}

slope_fit loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 10)
    throw std::invalid_argument("loglog_slope: need at least 10 paired points");
  // upper envelope: max y per decade of x
  struct pt {
    double lx, ly;
  };
  std::vector<pt> env;
  std::vector<int> decades;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("loglog_slope: values must be positive");
    const int dec = static_cast<int>(std::floor(std::log10(x[i])));
    auto it = std::find(decades.begin(), decades.end(), dec);
    if (it == decades.end()) {
      decades.push_back(dec);
      env.push_back({std::log10(x[i]), std::log10(y[i])});
    } else {
      pt& p = env[static_cast<size_t>(it - decades.begin())];
      if (std::log10(y[i]) > p.ly) p = {std::log10(x[i]), std::log10(y[i])};
    }
  }
  if (env.size() < 2) throw std::invalid_argument("loglog_slope: degenerate x range");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(env.size());
  for (const pt& p : env) {
    sx += p.lx;
    sy += p.ly;
    sxx += p.lx * p.lx;
    sxy += p.lx * p.ly;
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) throw std::invalid_argument("loglog_slope: degenerate x range");
  slope_fit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.points = static_cast<int>(env.size());
  double ss = 0.0;
  const double icpt = (sy - fit.slope * sx) / m;
  for (const pt& p : env) {
    const double r = p.ly - (icpt + fit.slope * p.lx);
    ss += r * r;
  }
  if (env.size() > 2) fit.stderr_ = std::sqrt(ss / (m - 2.0) / (sxx - sx * sx / m));
  return fit;
}

const char* method_name(method m) {
  switch (m) {
    case method::companion_qr: return "companionQR";
    case method::companion_qz: return "companionQZ";
    case method::dense_qr: return "denseQR";
  }
  return "?";
}

namespace {

experiment_row run_point(method m, int degree, int rho, std::uint64_t point_seed,
                         const experiment_config& cfg) {
  experiment_row row;
  row.m = m;
  row.degree = degree;
  row.rho = rho;
  row.seed = point_seed;

  const std::vector<cplx> raw = random_poly(degree, rho, point_seed);
  // companion QR and the dense comparison run on the monic polynomial; the
  // pencil keeps the raw coefficients (scaled or not inside the solver)
  std::vector<cplx> cmp = raw;
  if (m != method::companion_qz) {
    const cplx an = cmp.back();
    for (cplx& v : cmp) v /= an;
    cmp.back() = 1.0;
  }
  double na = 0.0;
  for (const cplx& v : cmp) na += std::norm(v);
  row.norm_a = std::sqrt(na);

  try {
    std::vector<cplx> roots;
    long sweeps = 0;
    if (m == method::companion_qr) {
      solve_options opts;
      opts.accumulate = cfg.accumulate;
      opts.seed = point_seed;
      const solve_result r = solve_qr(preprocess(cmp), opts);
      roots = r.roots;
      sweeps = r.diag.sweeps;
      if (r.diag.matrix_backward_error) row.delta_A = *r.diag.matrix_backward_error;
    } else if (m == method::companion_qz) {
      solve_options opts;
      opts.scale = cfg.qz_scale;
      opts.accumulate = cfg.accumulate;
      opts.seed = point_seed;
      const solve_result r = solve_qz(preprocess(cmp), opts);
      roots = r.roots;
      sweeps = r.diag.sweeps;
      if (r.diag.pencil_backward_error_v) row.delta_A = *r.diag.pencil_backward_error_v;
    } else {
      roots = dense_francis(dense_companion(cmp), {.seed = point_seed});
      if (cfg.accumulate) row.delta_A = std::nullopt;  // not tracked on the dense path
    }
    row.sweeps = sweeps;
    const backward_error be = coefficient_backward_error(cmp, roots);
    row.delta_a = be.delta_a;
    row.delta_a_scaled = be.delta_a_scaled;
  } catch (const no_convergence_error&) {
    row.ok = false;
  }
  return row;
}

}  // namespace

std::vector<experiment_row> run_experiment(const experiment_config& cfg) {
  struct point {
    method m;
    int degree, rho, sample;
  };
  std::vector<point> grid;
  for (method m : cfg.methods)
    for (int degree : cfg.degrees)
      for (int rho = cfg.rho_min; rho <= cfg.rho_max; ++rho)
        for (int s = 0; s < cfg.samples; ++s) grid.push_back({m, degree, rho, s});

  std::vector<experiment_row> rows(grid.size());
  std::exception_ptr failure;
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.size()); ++i) {
    const point& pt = grid[static_cast<size_t>(i)];
    // per-point stream: independent of method so every method sees the
    // same polynomial for a given (degree, rho, sample)
    const std::uint64_t point_seed =
        counter_rng(cfg.seed, (static_cast<std::uint64_t>(pt.degree) << 32) ^
                                  (static_cast<std::uint64_t>(pt.rho) << 16) ^
                                  static_cast<std::uint64_t>(pt.sample));
    try {
      rows[static_cast<size_t>(i)] = run_point(pt.m, pt.degree, pt.rho, point_seed, cfg);
    } catch (...) {
      // no_convergence is recorded as a row; anything else is a defect and
      // must not escape the parallel region
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void write_csv(std::ostream& os, std::span<const experiment_row> rows) {
  os << "method,degree,rho,seed,norm_a,delta_A,delta_a,delta_a_scaled,sweeps,status\n";
  for (const experiment_row& r : rows) {
    os << method_name(r.m) << ',' << r.degree << ',' << r.rho << ',' << r.seed << ','
       << format_double(r.norm_a) << ',';
    if (r.delta_A) os << format_double(*r.delta_A);
    os << ',' << format_double(r.delta_a) << ',' << format_double(r.delta_a_scaled) << ','
       << r.sweeps << ',' << (r.ok ? "ok" : "noconv") << '\n';
  }
}

std::vector<bench_row> run_benchmark(std::span<const int> degrees, int repeats,
                                     std::span<const method> methods, std::uint64_t seed) {
  if (repeats < 1) throw std::invalid_argument("run_benchmark: repeats must be >= 1");
  using clock = std::chrono::steady_clock;
  std::vector<bench_row> out;
  for (const method m : methods) {
    for (const int degree : degrees) {
      if (m == method::dense_qr && degree > 512) continue;  // oracle cap
      const std::vector<cplx> a = random_poly(degree, 3, seed);
      std::vector<double> times;
      for (int rep = 0; rep <= repeats; ++rep) {  // one discarded warmup run
        const auto t0 = clock::now();
        if (m == method::companion_qr) {
          solve_qr(preprocess(a));
        } else if (m == method::companion_qz) {
          solve_qz(preprocess(a));
        } else {
          std::vector<cplx> monic = a;
          const cplx an = monic.back();
          for (cplx& v : monic) v /= an;
          monic.back() = 1.0;
          dense_francis(dense_companion(monic));
        }
        const auto t1 = clock::now();
        if (rep > 0) times.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
      std::sort(times.begin(), times.end());
      out.push_back({m, degree, times[times.size() / 2]});
    }
  }
  return out;
}

}  // namespace corechase
