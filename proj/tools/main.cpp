// Command line driver: root solving, the backward-error experiment grid,
// and the scaling benchmark.
//
// Exit codes: 0 success, 1 usage or input error, 2 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "dense.hpp"
#include "experiment.hpp"
#include "qz_chase.hpp"

using namespace corechase;
using nlohmann::json;

namespace {

std::vector<cplx> parse_inline(const std::string& text) {
  std::vector<cplx> a;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad coefficient '" + tok + "'");
    }
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (pos != tok.size()) throw std::invalid_argument("bad coefficient '" + tok + "'");
    a.emplace_back(v, 0.0);
  }
  if (a.empty()) throw std::invalid_argument("no coefficients given");
  return a;
}

std::vector<cplx> parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  const json doc = json::parse(in);  // throws with the offending token on bad input
  if (!doc.is_array() || doc.empty())
    throw std::invalid_argument("expected a nonempty JSON array of [re, im] pairs");
  std::vector<cplx> a;
  for (const json& item : doc) {
    if (item.is_number()) {
      a.emplace_back(item.get<double>(), 0.0);
    } else if (item.is_array() && item.size() == 2 && item[0].is_number() &&
               item[1].is_number()) {
      a.emplace_back(item[0].get<double>(), item[1].get<double>());
    } else {
      throw std::invalid_argument("expected [re, im] pair, got " + item.dump());
    }
  }
  return a;
}

scale_mode parse_scale(const std::string& s) {
  if (s == "monic") return scale_mode::monic;
  if (s == "norm") return scale_mode::norm;
  if (s == "none") return scale_mode::none;
  return scale_mode::standard;
}

int cmd_roots(const std::string& file, const std::string& inline_coeffs,
              const std::string& method_name, const std::string& scale_name,
              const std::string& order, int max_iter, bool as_json, bool as_csv,
              bool diagnostics, std::uint64_t seed) {
  std::vector<cplx> a = file.empty() ? parse_inline(inline_coeffs) : parse_json_file(file);
  if (order == "descending") std::reverse(a.begin(), a.end());

  const polynomial p = preprocess(a);
  solve_options opts;
  opts.scale = parse_scale(scale_name);
  opts.max_sweeps_per_eigenvalue = max_iter;
  opts.seed = seed;
  opts.accumulate = diagnostics && p.degree() <= 512;

  std::vector<cplx> roots;
  solve_diagnostics diag;
  if (method_name == "qr") {
    const solve_result r = solve_qr(p, opts);
    roots = r.roots;
    diag = r.diag;
  } else if (method_name == "qz") {
    const solve_result r = solve_qz(p, opts);
    roots = r.roots;
    diag = r.diag;
  } else {  // dense
    std::vector<cplx> monic = p.coeffs;
    const cplx an = monic.back();
    for (cplx& v : monic) v /= an;
    monic.back() = 1.0;
    roots.assign(static_cast<size_t>(p.zero_roots), cplx(0.0));
    if (p.degree() >= 1) {
      const std::vector<cplx> lam = dense_francis(dense_companion(monic), {.seed = seed});
      roots.insert(roots.end(), lam.begin(), lam.end());
    }
  }

  if (as_json) {
    json out = json::array();
    for (const cplx& r : roots) out.push_back({r.real(), r.imag()});
    std::cout << out.dump() << "\n";
  } else {
    if (as_csv) std::cout << "re,im\n";
    for (const cplx& r : roots)
      std::cout << format_double(r.real()) << ',' << format_double(r.imag()) << "\n";
  }
  if (diagnostics) {
    std::cerr << "sweeps " << diag.sweeps << ", turnovers " << diag.turnovers
              << ", sine drift C " << format_double(diag.sine_drift_c) << ", B "
              << format_double(diag.sine_drift_b);
    if (diag.matrix_backward_error)
      std::cerr << ", ||dA||_F " << format_double(*diag.matrix_backward_error);
    std::cerr << "\n";
  }
  return 0;
}

method parse_method(const std::string& name) {
  if (name == "qr") return method::companion_qr;
  if (name == "qz") return method::companion_qz;
  if (name == "dense") return method::dense_qr;
  throw CLI::ValidationError("--methods", "unknown method '" + name + "'");
}

int cmd_experiment(const experiment_config& cfg, const std::string& out_path) {
  const std::vector<experiment_row> rows = run_experiment(cfg);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return 1;
    }
    write_csv(out, rows);
  } else {
    write_csv(std::cout, rows);
  }
  // summary: per-method envelope slopes of the backward errors
  for (const method m : cfg.methods) {
    std::vector<double> xs, ys, yss;
    long noconv = 0;
    for (const experiment_row& r : rows) {
      if (r.m != m) continue;
      if (!r.ok) {
        ++noconv;
        continue;
      }
      xs.push_back(r.norm_a);
      ys.push_back(r.delta_a);
      yss.push_back(r.delta_a_scaled);
    }
    std::cerr << method_name(m) << ": " << xs.size() << " runs";
    if (noconv > 0) std::cerr << " (" << noconv << " NOT converged)";
    if (xs.size() >= 10) {
      try {
        std::cerr << ", slope(delta_a) " << format_double(loglog_slope(xs, ys).slope)
                  << ", slope(delta_a_scaled) " << format_double(loglog_slope(xs, yss).slope);
      } catch (const std::invalid_argument&) {
        std::cerr << ", slope unavailable (degenerate range)";
      }
    }
    std::cerr << "\n";
  }
  return 0;
}

int cmd_bench(const std::vector<int>& degrees, int repeats, const std::vector<method>& methods,
              std::uint64_t seed, const std::string& out_path) {
  const std::vector<bench_row> rows = run_benchmark(degrees, repeats, methods, seed);
  std::ostringstream csv;
  csv << "method,degree,seconds\n";
  for (const bench_row& r : rows)
    csv << method_name(r.m) << ',' << r.degree << ',' << format_double(r.seconds) << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return 1;
    }
    out << csv.str();
  }
  std::cout << csv.str();

  std::map<std::pair<int, int>, double> t;  // (method index, degree) -> seconds
  for (const bench_row& r : rows) t[{static_cast<int>(r.m), r.degree}] = r.seconds;
  for (const method m : methods) {
    for (size_t i = 0; i + 1 < degrees.size(); ++i) {
      const auto a = t.find({static_cast<int>(m), degrees[i]});
      const auto b = t.find({static_cast<int>(m), degrees[i + 1]});
      if (a == t.end() || b == t.end()) continue;
      std::cout << method_name(m) << " t(" << degrees[i + 1] << ")/t(" << degrees[i] << ") = "
                << format_double(b->second / a->second) << "\n";
    }
  }
  for (const int d : degrees) {
    const auto qr = t.find({static_cast<int>(method::companion_qr), d});
    const auto qz = t.find({static_cast<int>(method::companion_qz), d});
    if (qr != t.end() && qz != t.end())
      std::cout << "qz/qr@" << d << " = " << format_double(qz->second / qr->second) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structured polynomial rootfinder: companion QR/QZ core chasing"};
  app.require_subcommand(1);

  // roots
  auto* roots = app.add_subcommand("roots", "compute all roots of a polynomial");
  std::string file, inline_coeffs, method_name_ = "qr", scale_name = "default",
                    order = "ascending";
  int max_iter = 30;
  bool as_json = false, as_csv = false, diagnostics = false;
  std::uint64_t seed = 0x7c0ffee5ull;
  roots->add_option("file", file, "JSON file: array of [re, im] pairs, ascending powers");
  roots->add_option("--inline", inline_coeffs, "comma-separated real coefficients, ascending");
  roots->add_option("--method", method_name_, "qr | qz | dense")
      ->check(CLI::IsMember({"qr", "qz", "dense"}));
  roots->add_option("--scale", scale_name, "monic | norm | none (default: monic for qr, norm for qz)")
      ->check(CLI::IsMember({"monic", "norm", "none", "default"}));
  roots->add_option("--order", order, "coefficient order of the input")
      ->check(CLI::IsMember({"ascending", "descending"}));
  roots->add_option("--max-iter", max_iter, "sweep budget per eigenvalue")->check(CLI::PositiveNumber);
  roots->add_flag("--json", as_json, "emit a JSON array of [re, im]");
  roots->add_flag("--csv", as_csv, "emit a re,im header before the root lines");
  roots->add_flag("--diagnostics", diagnostics, "print iteration diagnostics to stderr");
  roots->add_option("--seed", seed, "seed for exceptional shifts");

  // experiment
  auto* exp = app.add_subcommand("experiment", "backward-error experiment grid, CSV output");
  experiment_config cfg;
  std::vector<std::string> method_names{"qr"};
  std::string qz_scale_name = "norm", out_path;
  exp->add_option("--degrees", cfg.degrees, "polynomial degrees")->expected(-1);
  exp->add_option("--rho-min", cfg.rho_min, "smallest coefficient-spread exponent");
  exp->add_option("--rho-max", cfg.rho_max, "largest coefficient-spread exponent");
  exp->add_option("--samples", cfg.samples, "runs per (degree, rho) cell")->check(CLI::PositiveNumber);
  exp->add_option("--methods", method_names, "any of qr, qz, dense")->expected(-1);
  exp->add_option("--seed", cfg.seed, "grid seed");
  exp->add_option("--scale", qz_scale_name, "qz scaling: norm | none")
      ->check(CLI::IsMember({"norm", "none"}));
  exp->add_flag("--accumulate", cfg.accumulate, "track dense matrix backward errors (slow)");
  exp->add_option("--threads", cfg.threads, "parallel grid workers (0 = default)");
  exp->add_option("--out", out_path, "CSV output path (default: stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "wall-time scaling benchmark");
  std::vector<int> bench_degrees{256, 512, 1024, 2048};
  std::vector<std::string> bench_method_names{"qr", "qz"};
  int repeats = 3;
  std::uint64_t bench_seed = 909;
  std::string bench_out;
  bench->add_option("--degrees", bench_degrees, "degrees to time")->expected(-1);
  bench->add_option("--repeats", repeats, "timed repetitions (median reported)");
  bench->add_option("--methods", bench_method_names, "any of qr, qz, dense")->expected(-1);
  bench->add_option("--seed", bench_seed, "polynomial seed");
  bench->add_option("--out", bench_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (roots->parsed()) {
      if (file.empty() && inline_coeffs.empty()) {
        std::cerr << "error: give a JSON file or --inline coefficients\n";
        return 1;
      }
      return cmd_roots(file, inline_coeffs, method_name_, scale_name, order, max_iter, as_json,
                       as_csv, diagnostics, seed);
    }
    if (exp->parsed()) {
      cfg.methods.clear();
      for (const std::string& name : method_names) cfg.methods.push_back(parse_method(name));
      cfg.qz_scale = qz_scale_name == "none" ? scale_mode::none : scale_mode::norm;
      if (cfg.rho_min > cfg.rho_max) {
        std::cerr << "error: --rho-min exceeds --rho-max\n";
        return 1;
      }
      return cmd_experiment(cfg, out_path);
    }
    if (bench->parsed()) {
      if (repeats < 1) {
        std::cerr << "error: --repeats must be positive\n";
        return 1;
      }
      std::vector<method> ms;
      for (const std::string& name : bench_method_names) ms.push_back(parse_method(name));
      return cmd_bench(bench_degrees, repeats, ms, bench_seed, bench_out);
    }
  } catch (const no_convergence_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const infinite_eigenvalue_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const corruption_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
