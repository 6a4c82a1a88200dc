#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "companion.hpp"
#include "qr_chase.hpp"

namespace corechase {

// ---- deterministic counter-based randomness -------------------------------
//
// Stream value k under a seed is splitmix64_mix(seed + k * golden) with the
// usual splitmix64 constants; uniform doubles take the top 53 bits.
std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t counter);
double counter_uniform01(std::uint64_t seed, std::uint64_t counter);

// Random coefficient vector (degree+1 entries, ascending): each coefficient
// has argument 2*pi*nu and modulus |2*mu - 1| * 10^(rho*(2*eta - 1)) from
// three independent uniforms; moduli spread over about 2*rho decades.
std::vector<cplx> random_poly(int degree, int rho, std::uint64_t seed);

// Monic coefficients of prod (z - root_k), expanded in double-double
// arithmetic over a balanced product tree and rounded once at the end.
// Throws std::overflow_error when the product leaves the representable range.
std::vector<cplx> coeffs_from_roots(std::span<const cplx> roots);

struct backward_error {
  double delta_a = 0.0;         // || a - atilde ||_2
  double delta_a_scaled = 0.0;  // min over gamma of || a - gamma*atilde ||_2
  cplx gamma{1.0, 0.0};
};

// Compares a against the monic reconstruction from the computed roots.
backward_error coefficient_backward_error(std::span<const cplx> a, std::span<const cplx> roots);

// ---- matching --------------------------------------------------------------

// Smallest achievable maximum pairing distance between two equal-size sets
// (optimal bottleneck matching; greedy preselection, exact via augmenting
// paths on a distance threshold).
double matched_distance(std::span<const cplx> x, std::span<const cplx> y);

// ---- slope fits -------------------------------------------------------------

struct slope_fit {
  double slope = 0.0;
  double stderr_ = 0.0;
  int points = 0;
};

// Least-squares slope of log10 y against log10 x over the upper envelope
// (the maximal y per decade of x), matching the worst-case reading of the
// scatter plots.  Needs >= 10 positive points spanning > 1 decade.
slope_fit loglog_slope(std::span<const double> x, std::span<const double> y);

// ---- experiment grid --------------------------------------------------------

enum class method { companion_qr, companion_qz, dense_qr };
const char* method_name(method m);

struct experiment_config {
  std::vector<int> degrees{50};
  int rho_min = 1, rho_max = 12;
  int samples = 100;
  std::vector<method> methods{method::companion_qr};
  std::uint64_t seed = 20250101;
  scale_mode qz_scale = scale_mode::norm;  // norm (scaled) or none (raw)
  bool accumulate = false;                 // record ||delta A||_F (QR methods)
  int threads = 0;                         // 0 = library default
};

struct experiment_row {
  method m = method::companion_qr;
  int degree = 0;
  int rho = 0;
  std::uint64_t seed = 0;
  double norm_a = 0.0;
  std::optional<double> delta_A;
  double delta_a = 0.0;
  double delta_a_scaled = 0.0;
  long sweeps = 0;
  bool ok = true;
};

// Runs the full grid; failures are recorded as rows with ok = false, never
// dropped.  Grid points are independent and run in parallel when OpenMP is
// available; results are ordered by (method, degree, rho, sample) regardless.
std::vector<experiment_row> run_experiment(const experiment_config& cfg);

// CSV schema:
// method,degree,rho,seed,norm_a,delta_A,delta_a,delta_a_scaled,sweeps,status
void write_csv(std::ostream& os, std::span<const experiment_row> rows);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// ---- benchmarking -----------------------------------------------------------

struct bench_row {
  method m;
  int degree;
  double seconds;  // median over repeats
};

std::vector<bench_row> run_benchmark(std::span<const int> degrees, int repeats,
                                     std::span<const method> methods, std::uint64_t seed);

}  // namespace corechase
