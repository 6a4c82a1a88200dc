// Acceptance suite: runs every stability and performance criterion end to
// end and prints one PASS/FAIL line per criterion.  Exits nonzero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "dense.hpp"
#include "experiment.hpp"
#include "qz_chase.hpp"
#include "test_helpers.hpp"

using namespace corechase;

namespace {

const double u = unit_roundoff;
int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<cplx> unit_circle_poly(int n) {
  std::vector<cplx> a(static_cast<size_t>(n) + 1, cplx(0.0));
  a[0] = -1.0;
  a[static_cast<size_t>(n)] = 1.0;
  return a;
}

// exact n-th roots of unity
std::vector<cplx> roots_of_unity(int n) {
  std::vector<cplx> r;
  for (int k = 0; k < n; ++k) {
    const double ang = 2.0 * std::numbers::pi * k / n;
    r.emplace_back(std::cos(ang), std::sin(ang));
  }
  return r;
}

// max over computed roots of the distance to the nearest analytic root;
// the roots of unity are separated by far more than the tolerance, so
// nearest-neighbor matching is the optimal matching here.
double max_error_vs(const std::vector<cplx>& got, const std::vector<cplx>& want) {
  double worst = 0.0;
  for (const cplx& g : got) {
    double best = 1e300;
    for (const cplx& w : want) best = std::min(best, std::abs(g - w));
    worst = std::max(worst, best);
  }
  return worst;
}

void criterion_1() {
  bool pass = true;
  std::string detail;
  for (int n : {8, 64, 256}) {
    const polynomial p = preprocess(unit_circle_poly(n));
    const auto t0 = std::chrono::steady_clock::now();
    const solve_result rqr = solve_qr(p);
    const double tqr = seconds_since(t0);
    const auto t1 = std::chrono::steady_clock::now();
    const solve_result rqz = solve_qz(p);
    const double tqz = seconds_since(t1);
    const std::vector<cplx> want = roots_of_unity(n);
    const double eqr = max_error_vs(rqr.roots, want);
    const double eqz = max_error_vs(rqz.roots, want);
    pass = pass && eqr <= 1e-12 && eqz <= 1e-12 && tqr < 1.0 && tqz < 1.0;
    if (n == 256)
      detail = "n=256: qr err " + format_double(eqr) + " in " + format_double(tqr) +
               " s, qz err " + format_double(eqz) + " in " + format_double(tqz) + " s";
  }
  report(1, pass, "roots of unity, degrees 8/64/256, both solvers, <= 1e-12, < 1 s", detail);
}

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  testutil::test_rng rng(2025);
  double worst_dense = 0.0, worst_sine = 0.0;
  using testutil::embed;
  using testutil::matmul;
  for (int i = 0; i < 10000; ++i) {
    const rotation x0 = rng.random_rotation(), y0 = rng.random_rotation(),
                   z0 = rng.random_rotation();
    rotation x = x0, y = y0, z = z0;
    turnover(x, y, z);
    const auto before = matmul(matmul(embed(x0, 0, 3), embed(y0, 1, 3), 3), embed(z0, 0, 3), 3);
    const auto after = matmul(matmul(embed(x, 1, 3), embed(y, 0, 3), 3), embed(z, 1, 3), 3);
    worst_dense = std::max(worst_dense, testutil::max_abs_diff(before, after));
    const double in13 = x0.s * y0.s, out13 = y.s * z.s;
    if (in13 != 0.0) worst_sine = std::max(worst_sine, std::abs(out13 - in13) / std::abs(in13));
  }
  double worst_pass = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 3 + static_cast<int>(rng.next() % 6);
    std::vector<cplx> t(static_cast<size_t>(n));
    for (cplx& v : t) v = rng.complex_unit_ball() * 2.0;
    factored_triangular f = factored_triangular::from_spike(t);
    const cmat before = dense_triangular_extended(f);
    const int idx = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n - 1));
    const rotation g = rng.random_rotation();
    const rotation gh = f.pass_right_to_left(g, idx);
    cmat lhs = before;
    lhs.apply_right(g, idx);
    cmat rhs = dense_triangular_extended(f);
    rhs.apply_left(gh, idx);
    double diff = 0.0;
    for (int r = 0; r <= n; ++r)
      for (int c = 0; c <= n; ++c) diff = std::max(diff, std::abs(lhs(r, c) - rhs(r, c)));
    worst_pass = std::max(worst_pass, diff / std::abs(f.alpha()));
  }
  const double dt = seconds_since(t0);
  const bool pass = worst_dense <= 20 * u && worst_sine <= 10 * u && worst_pass <= 100 * u &&
                    dt < 10.0;
  report(2, pass, "1e4 turnovers (20u dense, 10u sine products), 1e3 pass-throughs (100u)",
         "dense " + format_double(worst_dense / u) + "u, sine " +
             format_double(worst_sine / u) + "u, pass " + format_double(worst_pass / u) +
             "u, " + format_double(dt) + " s");
}

void criterion_3() {
  double worst = 0.0;
  bool ok = true;
  for (int s = 0; s < 100; ++s) {
    const std::vector<cplx> a = random_poly(50, 6, 330000 + static_cast<std::uint64_t>(s));
    try {
      const solve_result r = solve_qr(preprocess(a));
      worst = std::max({worst, r.diag.sine_drift_c, r.diag.sine_drift_b});
    } catch (const no_convergence_error&) {
      ok = false;
    }
  }
  report(3, ok && worst <= 1e-12,
         "sine products of C and B conserved to 1e-12 over 100 degree-50 solves",
         "worst relative drift " + format_double(worst));
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  experiment_config cfg;
  cfg.degrees = {20};
  cfg.samples = 20;
  cfg.methods = {method::companion_qr};
  cfg.accumulate = true;
  cfg.seed = 44000;
  const std::vector<experiment_row> rows = run_experiment(cfg);
  bool all_bounded = true;
  std::vector<double> xs, ys;
  double worst_ratio = 0.0;
  for (const experiment_row& r : rows) {
    if (!r.ok || !r.delta_A) {
      all_bounded = false;
      continue;
    }
    const double n = 20.0;
    const double norm_a_f = std::sqrt(r.norm_a * r.norm_a + n - 2.0);  // ~ ||A||_F
    const double ratio = *r.delta_A / (100.0 * n * u * norm_a_f);
    worst_ratio = std::max(worst_ratio, ratio);
    all_bounded = all_bounded && ratio <= 1.0;
    xs.push_back(r.norm_a);
    ys.push_back(*r.delta_A);
  }
  const slope_fit fit = loglog_slope(xs, ys);
  const double dt = seconds_since(t0);
  const bool pass =
      all_bounded && std::abs(fit.slope - 1.0) <= 0.25 && dt < 300.0;
  report(4, pass, "matrix backward error <= 100 n u ||A||_F with envelope slope 1.0 +/- 0.25",
         "worst bound ratio " + format_double(worst_ratio) + ", slope " +
             format_double(fit.slope) + ", " + format_double(dt) + " s");
}

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  experiment_config cfg;
  cfg.degrees = {50};
  cfg.samples = 100;
  cfg.methods = {method::companion_qr};
  cfg.seed = 55000;
  const std::vector<experiment_row> rows = run_experiment(cfg);
  bool all_bounded = true;
  double worst = 0.0;
  std::vector<double> xs, ys;
  for (const experiment_row& r : rows) {
    if (!r.ok) {
      all_bounded = false;
      continue;
    }
    worst = std::max(worst, r.delta_a / r.norm_a);
    all_bounded = all_bounded && r.delta_a <= 1e-10 * r.norm_a;
    xs.push_back(r.norm_a);
    ys.push_back(r.delta_a);
  }
  const slope_fit fit = loglog_slope(xs, ys);
  const double dt = seconds_since(t0);
  const bool pass = all_bounded && std::abs(fit.slope - 1.0) <= 0.25 && dt < 600.0;
  report(5, pass,
         "companion QR coefficient backward error <= 1e-10 ||a||, slope 1.0 +/- 0.25 (1200 runs)",
         "worst ||da||/||a|| " + format_double(worst) + ", slope " + format_double(fit.slope) +
             ", " + format_double(dt) + " s");
}

void criterion_6() {
  experiment_config cfg;
  cfg.degrees = {20};
  cfg.samples = 100;
  cfg.methods = {method::dense_qr};
  cfg.seed = 66000;
  const std::vector<experiment_row> rows = run_experiment(cfg);
  std::vector<double> xs, ys;
  for (const experiment_row& r : rows) {
    if (!r.ok) continue;
    xs.push_back(r.norm_a);
    ys.push_back(r.delta_a);
  }
  const slope_fit fit = loglog_slope(xs, ys);
  report(6, fit.slope >= 1.6,
         "unstructured Francis coefficient backward error grows quadratically (slope >= 1.6)",
         "slope " + format_double(fit.slope) + " over " + std::to_string(xs.size()) + " runs");
}

void criterion_7() {
  experiment_config cfg;
  cfg.degrees = {50};
  cfg.samples = 100;
  cfg.methods = {method::companion_qz};
  cfg.seed = 77000;

  cfg.qz_scale = scale_mode::none;  // raw coefficients
  const std::vector<experiment_row> raw = run_experiment(cfg);
  std::vector<double> xs, ys;
  for (const experiment_row& r : raw) {
    if (!r.ok) continue;
    xs.push_back(r.norm_a);
    ys.push_back(r.delta_a_scaled);
  }
  const slope_fit unscaled_fit = loglog_slope(xs, ys);

  cfg.qz_scale = scale_mode::norm;
  const std::vector<experiment_row> scaled = run_experiment(cfg);
  bool all_bounded = true;
  double worst = 0.0;
  xs.clear();
  ys.clear();
  for (const experiment_row& r : scaled) {
    if (!r.ok) {
      all_bounded = false;
      continue;
    }
    worst = std::max(worst, r.delta_a_scaled / r.norm_a);
    all_bounded = all_bounded && r.delta_a_scaled <= 1e-10 * r.norm_a;
    xs.push_back(r.norm_a);
    ys.push_back(r.delta_a_scaled);
  }
  const slope_fit scaled_fit = loglog_slope(xs, ys);
  const bool pass = unscaled_fit.slope >= 1.6 && all_bounded &&
                    std::abs(scaled_fit.slope - 1.0) <= 0.25;
  report(7, pass, "companion QZ: unscaled slope >= 1.6; norm-scaled <= 1e-10 ||a||, slope ~1",
         "unscaled slope " + format_double(unscaled_fit.slope) + ", scaled slope " +
             format_double(scaled_fit.slope) + ", worst scaled ratio " + format_double(worst));
}

void criterion_8() {
  double worst = 0.0;
  bool ok = true;
  for (int s = 0; s < 100; ++s) {
    const std::vector<cplx> a = random_poly(12, 1, 880000 + static_cast<std::uint64_t>(s));
    double na = 0.0;
    for (const cplx& v : a) na += std::norm(v);
    if (std::sqrt(na) > 1e3) continue;  // stay within the advertised norm range
    try {
      const polynomial p = preprocess(a);
      const std::vector<cplx> r1 = solve_qr(p).roots;
      const std::vector<cplx> r2 = solve_qz(p).roots;
      std::vector<cplx> monic = a;
      for (cplx& v : monic) v /= a.back();
      monic.back() = 1.0;
      const std::vector<cplx> r3 = dense_francis(dense_companion(monic));
      worst = std::max({worst, matched_distance(r1, r2), matched_distance(r1, r3),
                        matched_distance(r2, r3)});
    } catch (const no_convergence_error&) {
      ok = false;
    }
  }
  report(8, ok && worst <= 1e-8,
         "companion QR / companion QZ / dense Francis root sets match to 1e-8 (100 runs)",
         "worst matched distance " + format_double(worst));
}

void criterion_9() {
  const std::vector<int> degrees{256, 512, 1024, 2048};
  const std::vector<method> methods{method::companion_qr, method::companion_qz};
  const std::vector<bench_row> rows = run_benchmark(degrees, 5, methods, 909);
  auto find = [&](method m, int degree) {
    for (const bench_row& r : rows)
      if (r.m == m && r.degree == degree) return r.seconds;
    return -1.0;
  };
  bool pass = true;
  double rmin = 1e300, rmax = 0.0;
  std::string detail;
  for (const method m : methods) {
    for (size_t i = 0; i + 1 < degrees.size(); ++i) {
      const double ratio = find(m, degrees[i + 1]) / find(m, degrees[i]);
      pass = pass && ratio >= 3.2 && ratio <= 4.8;
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
    }
  }
  detail = "doubling ratios in [" + format_double(rmin) + ", " + format_double(rmax) + "]";
  for (int degree : {1024, 2048}) {
    const double rel = find(method::companion_qz, degree) / find(method::companion_qr, degree);
    pass = pass && rel >= 1.3 && rel <= 2.2;
    detail += ", qz/qr@" + std::to_string(degree) + " " + format_double(rel);
  }
  report(9, pass, "O(n^2) doubling ratios in [3.2, 4.8]; QZ/QR in [1.3, 2.2]", detail);
}

void criterion_10() {
  const int n = 8192;
  const std::vector<cplx> a = random_poly(n, 2, 1010);
  const polynomial p = preprocess(a);
  const solve_result rqr = solve_qr(p);
  const solve_result rqz = solve_qz(p);
  const std::size_t limit = 10u << 20;
  const bool pass =
      rqr.diag.peak_state_bytes < limit && rqz.diag.peak_state_bytes < limit;
  report(10, pass, "O(n) working state at degree 8192 (< 10 MB)",
         "qr state " + std::to_string(rqr.diag.peak_state_bytes / 1024) + " KiB, qz state " +
             std::to_string(rqz.diag.peak_state_bytes / 1024) + " KiB");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
