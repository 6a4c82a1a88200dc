#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <sstream>

#include "dd.hpp"
#include "experiment.hpp"
#include "test_helpers.hpp"

using namespace corechase;
using testutil::test_rng;

namespace {
const double u = unit_roundoff;
}

TEST_CASE("dd: round trip and error-free products") {
  const dd x(0.1);
  CHECK(x.to_double() == 0.1);
  // (hi, lo) of a product captures the exact residual
  const dd p = dd(3.0) * dd(1.0 / 3.0);
  CHECK(std::abs(p.to_double() - 1.0) <= 1e-31);
  // sum with cancellation beyond double precision
  const dd s = (dd(1.0) + dd(1e-25)) - dd(1.0);
  CHECK(s.to_double() == doctest::Approx(1e-25).epsilon(1e-10));
}

TEST_CASE("counter_rng: deterministic and uniform-ish") {
  CHECK(counter_rng(42, 0) == counter_rng(42, 0));
  CHECK(counter_rng(42, 0) != counter_rng(42, 1));
  CHECK(counter_rng(42, 0) != counter_rng(43, 0));
  double mean = 0.0;
  for (int k = 0; k < 4096; ++k) mean += counter_uniform01(7, static_cast<std::uint64_t>(k));
  mean /= 4096;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("random_poly: deterministic given the seed") {
  const std::vector<cplx> a = random_poly(50, 6, 123);
  const std::vector<cplx> b = random_poly(50, 6, 123);
  REQUIRE(a.size() == 51);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  const std::vector<cplx> c = random_poly(50, 6, 124);
  CHECK(a[0] != c[0]);
}

TEST_CASE("random_poly: rho = 0 keeps all moduli at most 1") {
  const std::vector<cplx> a = random_poly(80, 0, 5);
  for (const cplx& v : a) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("random_poly: rho = 12 spreads coefficients beyond 12 decades") {
  int spread = 0;
  for (int s = 0; s < 100; ++s) {
    const std::vector<cplx> a = random_poly(50, 12, 1000 + static_cast<std::uint64_t>(s));
    double lo = 1e300, hi = 0.0;
    for (const cplx& v : a) {
      const double m = std::abs(v);
      if (m == 0.0) continue;
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    if (hi / lo > 1e12) ++spread;
  }
  CHECK(spread >= 90);
}

TEST_CASE("coeffs_from_roots: pair of unit roots") {
  const std::vector<cplx> roots{cplx(1.0), cplx(-1.0)};
  const std::vector<cplx> a = coeffs_from_roots(roots);
  REQUIRE(a.size() == 3);
  CHECK(a[0] == cplx(-1.0));
  CHECK(a[1] == cplx(0.0));
  CHECK(a[2] == cplx(1.0));
}

TEST_CASE("coeffs_from_roots: symmetry cancellation on exactly representable roots") {
  // fourth roots of unity have exact binary components; the interior
  // coefficients cancel exactly in extended precision
  const std::vector<cplx> roots{cplx(1.0), cplx(-1.0), cplx(0.0, 1.0), cplx(0.0, -1.0)};
  const std::vector<cplx> a = coeffs_from_roots(roots);
  CHECK(std::abs(a[0] + 1.0) <= 1e-30);
  CHECK(std::abs(a[1]) <= 1e-30);
  CHECK(std::abs(a[2]) <= 1e-30);
  CHECK(std::abs(a[3]) <= 1e-30);
}

TEST_CASE("coeffs_from_roots: eighth roots of unity near z^8 - 1") {
  std::vector<cplx> roots;
  for (int k = 0; k < 8; ++k) {
    const double ang = 2.0 * std::numbers::pi * k / 8.0;
    roots.emplace_back(std::cos(ang), std::sin(ang));
  }
  const std::vector<cplx> a = coeffs_from_roots(roots);
  CHECK(std::abs(a[0] + 1.0) <= 10 * u);
  for (int k = 1; k < 8; ++k) CHECK(std::abs(a[static_cast<size_t>(k)]) <= 10 * u);
}

TEST_CASE("coeffs_from_roots: hand expansion of (z-2)(z-3)(z-4)") {
  const std::vector<cplx> a = coeffs_from_roots(std::vector<cplx>{cplx(2.0), cplx(3.0), cplx(4.0)});
  CHECK(a[0] == cplx(-24.0));
  CHECK(a[1] == cplx(26.0));
  CHECK(a[2] == cplx(-9.0));
  CHECK(a[3] == cplx(1.0));
}

TEST_CASE("coefficient_backward_error: exact roots give reconstruction noise only") {
  const std::vector<cplx> a{cplx(-24.0), cplx(26.0), cplx(-9.0), cplx(1.0)};
  const backward_error be =
      coefficient_backward_error(a, std::vector<cplx>{cplx(2.0), cplx(3.0), cplx(4.0)});
  CHECK(be.delta_a <= 1e-25);
}

TEST_CASE("coefficient_backward_error: exact scalar multiple is fully scaled away") {
  // atilde = 2a  <=>  a = 0.5 atilde: gamma = 1/2 and no scaled residual
  const std::vector<cplx> roots{cplx(2.0), cplx(3.0)};
  const std::vector<cplx> at = coeffs_from_roots(roots);
  std::vector<cplx> a = at;
  for (cplx& v : a) v *= 0.5;
  const backward_error be = coefficient_backward_error(a, roots);
  CHECK(std::abs(be.gamma - cplx(0.5)) <= 10 * u);
  CHECK(be.delta_a_scaled <= 10 * u);
}

TEST_CASE("coefficient_backward_error: first-order root perturbation oracle") {
  test_rng rng(81);
  const std::vector<cplx> roots{cplx(1.0, 0.5), cplx(-0.75, 0.25), cplx(0.3, -1.1), cplx(-0.2)};
  const std::vector<cplx> a = coeffs_from_roots(roots);
  std::vector<cplx> pert = roots;
  std::vector<cplx> deltas(roots.size());
  for (size_t k = 0; k < pert.size(); ++k) {
    deltas[k] = 1e-10 * rng.complex_unit_ball();
    pert[k] += deltas[k];
  }
  // first-order prediction: delta a = -sum_k delta_k * coeffs(prod_{j != k})
  std::vector<cplx> predicted(a.size(), cplx(0.0));
  for (size_t k = 0; k < roots.size(); ++k) {
    std::vector<cplx> others;
    for (size_t j = 0; j < roots.size(); ++j)
      if (j != k) others.push_back(roots[j]);
    const std::vector<cplx> sub = coeffs_from_roots(others);
    for (size_t i = 0; i < sub.size(); ++i) predicted[i] -= deltas[k] * sub[i];
  }
  double pn = 0.0;
  for (const cplx& v : predicted) pn += std::norm(v);
  pn = std::sqrt(pn);
  const backward_error be = coefficient_backward_error(a, pert);
  CHECK(be.delta_a >= pn / 100.0);
  CHECK(be.delta_a <= pn * 100.0);
}

TEST_CASE("coefficient_backward_error: gamma is stationary") {
  test_rng rng(82);
  const std::vector<cplx> roots{cplx(0.9, 0.1), cplx(-1.2, 0.4), cplx(0.2, -0.8)};
  std::vector<cplx> a = coeffs_from_roots(roots);
  for (cplx& v : a) v *= cplx(1.3, -0.2);
  a[1] += 1e-5;
  const backward_error be = coefficient_backward_error(a, roots);
  const std::vector<cplx> at = coeffs_from_roots(roots);
  for (int trial = 0; trial < 20; ++trial) {
    const cplx d = rng.complex_unit_ball();
    const double eps = 1e-6;
    double moved = 0.0;
    for (size_t i = 0; i < a.size(); ++i) moved += std::norm(a[i] - (be.gamma + eps * d) * at[i]);
    CHECK(std::sqrt(moved) >= be.delta_a_scaled - 1e-10);
  }
}

TEST_CASE("matched_distance: permutations match exactly") {
  test_rng rng(83);
  std::vector<cplx> x;
  for (int i = 0; i < 12; ++i) x.push_back(rng.complex_unit_ball());
  std::vector<cplx> y(x.rbegin(), x.rend());
  CHECK(matched_distance(x, y) == 0.0);
  y[3] += cplx(1e-7, 0.0);
  CHECK(matched_distance(x, y) <= 1e-7 * 1.0001);
}

TEST_CASE("matched_distance: forced pairing is optimal, not greedy") {
  // two clusters where greedy nearest assignment would strand a point
  const std::vector<cplx> x{cplx(0.0), cplx(1.0)};
  const std::vector<cplx> y{cplx(0.4), cplx(-0.1)};
  // optimal bottleneck pairs 0 -> -0.1 and 1 -> 0.4 with max distance 0.6
  CHECK(matched_distance(x, y) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("loglog_slope: exact powers") {
  std::vector<double> x, y1, y2;
  for (int i = 0; i < 12; ++i) {
    x.push_back(std::pow(10.0, i * 0.9 + 0.123));
    y1.push_back(x.back());
    y2.push_back(x.back() * x.back());
  }
  CHECK(loglog_slope(x, y1).slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(loglog_slope(x, y2).slope == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("loglog_slope: rejects degenerate input") {
  std::vector<double> x(12, 5.0), y(12, 1.0);
  CHECK_THROWS_AS((void)loglog_slope(x, y), std::invalid_argument);
  std::vector<double> small{1.0, 2.0};
  CHECK_THROWS_AS((void)loglog_slope(small, small), std::invalid_argument);
}

TEST_CASE("run_experiment: empty method list gives an empty table") {
  experiment_config cfg;
  cfg.methods.clear();
  CHECK(run_experiment(cfg).empty());
}

TEST_CASE("run_experiment: grid arithmetic and determinism") {
  experiment_config cfg;
  cfg.degrees = {10};
  cfg.samples = 2;
  cfg.rho_min = 1;
  cfg.rho_max = 12;
  cfg.methods = {method::companion_qr};
  cfg.seed = 99;
  const std::vector<experiment_row> rows = run_experiment(cfg);
  CHECK(rows.size() == 24);
  std::ostringstream csv1, csv2;
  write_csv(csv1, rows);
  write_csv(csv2, run_experiment(cfg));
  CHECK(csv1.str() == csv2.str());
  CHECK(csv1.str().starts_with(
      "method,degree,rho,seed,norm_a,delta_A,delta_a,delta_a_scaled,sweeps,status\n"));
  for (const experiment_row& r : rows) {
    CHECK(r.ok);
    CHECK(r.delta_a_scaled <= r.delta_a + 10 * u * r.norm_a);
  }
}

TEST_CASE("format_double: shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
