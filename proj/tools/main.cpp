// poik command line: pmf/cdf tables, median and mode queries, the boundary
// rate solver, scaling-law fits, figure-data sweeps and the self-check suite.
// Talks to the library strictly through the C API in poik.h.

#include <charconv>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "poik.h"

using nlohmann::json;

namespace {

constexpr uint64_t kDefaultSeed = 20230909;

// Shortest round-trip decimal form, at most 17 significant digits.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(int64_t v) { return std::to_string(v); }

[[noreturn]] void die(const std::string& msg, int code = 2) {
  std::fprintf(stderr, "poik: %s\n", msg.c_str());
  std::exit(code);
}

void check(poik_status st) {
  if (st != POIK_OK) {
    die(std::string(poik_last_error()) + " (" + poik_status_name(st) + ")");
  }
}

// Whole-buffer write so failed runs never leave partial files behind.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) die("cannot open output file " + tmp);
    out << content;
    if (!out) {
      std::remove(tmp.c_str());
      die("write failed for " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    die("cannot move output into place at " + path);
  }
}

struct Csv {
  std::string body;

  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) body += ',';
      body += h;
      first = false;
    }
    body += '\n';
  }

  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((body += (first ? "" : ","), body += fmt(cells), first = false), ...);
    body += '\n';
  }
};

uint64_t seed_default() {
  if (const char* env = std::getenv("POIK_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return static_cast<uint64_t>(v);
  }
  return kDefaultSeed;
}

int default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

poik_dist* make_dist(int64_t k, double lambda) {
  poik_dist* d = nullptr;
  check(poik_dist_create(k, lambda, &d));
  return d;
}

json solve_json(const poik_solve_result& r) {
  int ok = 0;
  check(poik_verify_boundary(&r, &ok));
  return json{{"k", r.k},
              {"nu", r.nu},
              {"lambda_star", r.lambda_star},
              {"mu_star", r.mu_star},
              {"residual", r.residual},
              {"iterations", r.iterations},
              {"bracket", {r.bracket_lo, r.bracket_hi}},
              {"used_cdf_bisection", r.used_cdf_bisection != 0},
              {"boundary_verified", ok != 0}};
}

std::vector<poik_solve_result> run_nu_mu(int64_t k, int64_t nu_hi, int jobs) {
  size_t count = 0;
  check(poik_sweep_nu_mu(k, nu_hi, jobs, nullptr, 0, &count));
  std::vector<poik_solve_result> rows(count);
  check(poik_sweep_nu_mu(k, nu_hi, jobs, rows.data(), rows.size(), &count));
  return rows;
}

std::vector<poik_sweep_record> run_base_median(int64_t k, int64_t n_lo, int64_t n_hi,
                                               int jobs) {
  size_t count = 0;
  check(poik_sweep_base_median_diff(k, n_lo, n_hi, jobs, nullptr, 0, &count));
  std::vector<poik_sweep_record> rows(count);
  check(poik_sweep_base_median_diff(k, n_lo, n_hi, jobs, rows.data(), rows.size(), &count));
  return rows;
}

void append_sweep_rows(Csv& csv, const std::vector<poik_sweep_record>& rows) {
  for (const auto& r : rows) {
    csv.row(r.k, r.n, r.median, r.base_median, r.scaled_diff, r.scaled_mean);
  }
}

Csv sweep_csv_header() {
  return Csv{"k", "n", "median", "base_median", "scaled_diff", "scaled_mean"};
}

// nu = k boundary solutions for every integer k in [2, k_hi].
std::vector<poik_solve_result> nu_eq_k_sweep(int64_t k_hi) {
  std::vector<poik_solve_result> rows;
  rows.reserve(static_cast<size_t>(k_hi) - 1);
  for (int64_t k = 2; k <= k_hi; ++k) {
    poik_solve_result r{};
    check(poik_solve_lambda_star(k, k, &r));
    rows.push_back(r);
  }
  return rows;
}

std::vector<int64_t> series_nu_grid(int64_t k, int points) {
  std::vector<int64_t> nus;
  nus.reserve(points);
  for (int i = 0; i < points; ++i) {
    nus.push_back(static_cast<int64_t>(
        std::llround(static_cast<double>(k) * (static_cast<double>(i) / (points - 1)))));
  }
  return nus;
}

struct SeriesData {
  std::vector<int64_t> ks, nus;
  std::vector<double> mus;
};

SeriesData collect_series_samples(const std::vector<int64_t>& k_list, int points) {
  SeriesData d;
  for (int64_t k : k_list) {
    for (int64_t nu : series_nu_grid(k, points)) {
      poik_solve_result r{};
      check(poik_solve_lambda_star(k, nu, &r));
      d.ks.push_back(k);
      d.nus.push_back(nu);
      d.mus.push_back(r.mu_star);
    }
  }
  return d;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson distribution of order k: stable pmf/cdf evaluation, integer "
               "median and mode, median-boundary rate solving, and scaling-law fits"};
  app.require_subcommand(1);

  // ---- pmf ----
  int64_t k = 1, n_max = 0, nu = 0;
  double lambda = 1.0;
  std::string output;
  std::string format = "csv";

  auto* pmf = app.add_subcommand("pmf", "Emit rows (n, pmf, cdf) for n = 0..n-max");
  pmf->add_option("--k", k, "order k (>= 1)")->required();
  pmf->add_option("--lambda", lambda, "rate parameter (> 0)")->required();
  pmf->add_option("--n-max", n_max, "last table index")->required();
  pmf->add_option("--output", output, "output path (default stdout)");
  pmf->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  pmf->callback([&] {
    poik_dist* d = make_dist(k, lambda);
    poik_table* t = nullptr;
    check(poik_table_create(d, n_max, 0, &t));
    if (format == "json") {
      json rows = json::array();
      for (int64_t n = 0; n <= n_max; ++n) {
        double p = 0, c = 0;
        check(poik_table_prob(t, n, &p));
        check(poik_table_cdf(t, n, &c));
        rows.push_back({{"n", n}, {"pmf", p}, {"cdf", c}});
      }
      emit(output, json{{"k", k}, {"lambda", lambda}, {"rows", rows}}.dump(2) + "\n");
    } else {
      Csv csv{"n", "pmf", "cdf"};
      for (int64_t n = 0; n <= n_max; ++n) {
        double p = 0, c = 0;
        check(poik_table_prob(t, n, &p));
        check(poik_table_cdf(t, n, &c));
        csv.row(n, p, c);
      }
      emit(output, csv.body);
    }
    poik_table_destroy(t);
    poik_dist_destroy(d);
  });

  // ---- median ----
  auto* med = app.add_subcommand("median", "Smallest nu with P(Y <= nu) >= 1/2");
  med->add_option("--k", k)->required();
  med->add_option("--lambda", lambda)->required();
  med->add_option("--output", output);
  med->callback([&] {
    poik_dist* d = make_dist(k, lambda);
    int64_t m = 0;
    check(poik_dist_median(d, &m));
    emit(output, json{{"k", k}, {"lambda", lambda}, {"median", m}}.dump() + "\n");
    poik_dist_destroy(d);
  });

  // ---- mode ----
  auto* mode_cmd = app.add_subcommand("mode", "Global maxima of the pmf (ties reported)");
  mode_cmd->add_option("--k", k)->required();
  mode_cmd->add_option("--lambda", lambda)->required();
  mode_cmd->add_option("--output", output);
  mode_cmd->callback([&] {
    poik_dist* d = make_dist(k, lambda);
    size_t count = 0;
    double peak = 0;
    check(poik_dist_mode(d, nullptr, 0, &count, &peak));
    std::vector<int64_t> modes(count);
    check(poik_dist_mode(d, modes.data(), modes.size(), &count, &peak));
    emit(output, json{{"k", k},
                      {"lambda", lambda},
                      {"modes", modes},
                      {"peak_probability", peak}}
                     .dump() +
                 "\n");
    poik_dist_destroy(d);
  });

  // ---- solve-lambda ----
  auto* solve = app.add_subcommand(
      "solve-lambda", "Rate lambda_star at which P(Y <= nu) = 1/2 for the target median");
  solve->add_option("--k", k)->required();
  solve->add_option("--nu", nu, "target median (>= 0)")->required();
  solve->add_option("--output", output);
  solve->callback([&] {
    if (nu < 0) die("--nu must be >= 0");
    poik_solve_result r{};
    check(poik_solve_lambda_star(k, nu, &r));
    emit(output, solve_json(r).dump() + "\n");
  });

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "Grid computations over nu or the pinned mean");
  sweep->require_subcommand(1);
  int jobs = default_jobs();
  int64_t nu_hi = 0, n_lo = -1, n_hi = -1;

  auto* sweep_nu = sweep->add_subcommand("nu-mu", "mu_star against target median nu = 0..nu-hi");
  sweep_nu->add_option("--k", k)->required();
  sweep_nu->add_option("--nu-hi", nu_hi)->required();
  sweep_nu->add_option("--jobs", jobs, "worker threads");
  sweep_nu->add_option("--output", output);
  sweep_nu->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sweep_nu->callback([&] {
    const auto rows = run_nu_mu(k, nu_hi, jobs);
    if (format == "json") {
      json arr = json::array();
      for (const auto& r : rows) arr.push_back(solve_json(r));
      emit(output, arr.dump(2) + "\n");
      return;
    }
    Csv csv{"k", "nu", "lambda_star", "mu_star"};
    for (const auto& r : rows) csv.row(r.k, r.nu, r.lambda_star, r.mu_star);
    emit(output, csv.body);
  });

  auto* sweep_bm = sweep->add_subcommand(
      "base-median", "median vs the base-median reference at integer means n in [n-lo, n-hi]");
  sweep_bm->add_option("--k", k)->required();
  sweep_bm->add_option("--n-lo", n_lo, "first mean (default: where the median leaves 0)");
  sweep_bm->add_option("--n-hi", n_hi)->required();
  sweep_bm->add_option("--jobs", jobs);
  sweep_bm->add_option("--output", output);
  sweep_bm->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sweep_bm->callback([&] {
    const auto rows = run_base_median(k, n_lo, n_hi, jobs);
    if (format == "json") {
      json arr = json::array();
      for (const auto& r : rows) {
        arr.push_back({{"k", r.k},
                       {"n", r.n},
                       {"median", r.median},
                       {"base_median", r.base_median},
                       {"scaled_diff", r.scaled_diff},
                       {"scaled_mean", r.scaled_mean}});
      }
      emit(output, arr.dump(2) + "\n");
      return;
    }
    Csv csv = sweep_csv_header();
    append_sweep_rows(csv, rows);
    emit(output, csv.body);
  });

  // ---- fit-delta ----
  int64_t k_lo = 2, k_hi_fit = 2000;
  auto* fit_delta = app.add_subcommand(
      "fit-delta", "Fit mu_star - k at nu = k to slope*k + intercept + c/k over integer k");
  fit_delta->add_option("--k-min", k_lo);
  fit_delta->add_option("--k-max", k_hi_fit);
  fit_delta->add_option("--output", output);
  fit_delta->callback([&] {
    if (k_lo < 2 || k_hi_fit < k_lo) die("need 2 <= k-min <= k-max");
    std::vector<int64_t> ks;
    std::vector<double> mus;
    for (int64_t kk = k_lo; kk <= k_hi_fit; ++kk) {
      poik_solve_result r{};
      check(poik_solve_lambda_star(kk, kk, &r));
      ks.push_back(kk);
      mus.push_back(r.mu_star);
    }
    poik_delta_fit fit{};
    check(poik_fit_delta_k(ks.data(), mus.data(), ks.size(), &fit));
    poik_residual_summary own{}, paper{};
    check(poik_residuals_delta_k(&fit, ks.data(), mus.data(), ks.size(), nullptr, &own));
    const poik_delta_fit pf = poik_paper_delta_fit();
    check(poik_residuals_delta_k(&pf, ks.data(), mus.data(), ks.size(), nullptr, &paper));
    emit(output, json{{"model", "delta_k"},
                      {"k_min", k_lo},
                      {"k_max", k_hi_fit},
                      {"samples", ks.size()},
                      {"slope", fit.slope},
                      {"intercept", fit.intercept},
                      {"inv_k_coefficient", fit.inv_k_coefficient},
                      {"residual_max_abs", own.max_abs},
                      {"residual_bias", own.bias},
                      {"reference_residual_max_abs", paper.max_abs},
                      {"reference_residual_bias", paper.bias}}
                     .dump(2) +
                 "\n");
  });

  // ---- fit-series ----
  std::vector<int64_t> k_list;
  int points = 21;
  auto* fit_series = app.add_subcommand(
      "fit-series", "Fit mu_star/(k+1) as a cubic series in nu/k with 1/(k+1) corrections");
  fit_series->add_option("--k-list", k_list, "comma separated k values")->delimiter(',');
  fit_series->add_option("--points", points, "nu/k grid points per k (>= 5)");
  fit_series->add_option("--output", output);
  fit_series->callback([&] {
    if (k_list.empty()) k_list = {100, 500, 1000, 2000};
    if (points < 5) die("--points must be >= 5");
    const SeriesData d = collect_series_samples(k_list, points);
    poik_series_fit fit{};
    check(poik_fit_mu_series(d.ks.data(), d.nus.data(), d.mus.data(), d.ks.size(), &fit));
    poik_residual_summary own{}, paper{};
    check(poik_residuals_mu_series(&fit, d.ks.data(), d.nus.data(), d.mus.data(), d.ks.size(),
                                   nullptr, &own));
    const poik_series_fit pf = poik_paper_series_fit();
    check(poik_residuals_mu_series(&pf, d.ks.data(), d.nus.data(), d.mus.data(), d.ks.size(),
                                   nullptr, &paper));
    emit(output, json{{"model", "mu_series"},
                      {"k_list", k_list},
                      {"points_per_k", points},
                      {"a0", fit.a0},
                      {"a1", {fit.a1_const, fit.a1_inv}},
                      {"a2", {fit.a2_const, fit.a2_inv}},
                      {"a3", {fit.a3_const, fit.a3_inv}},
                      {"residual_max_abs", own.max_abs},
                      {"residual_bias", own.bias},
                      {"reference_residual_max_abs", paper.max_abs},
                      {"reference_residual_bias", paper.bias}}
                     .dump(2) +
                 "\n");
  });

  // ---- figure ----
  int figure_id = 0;
  bool full_scale = false;
  auto* figure = app.add_subcommand("figure", "Emit the data series behind one of the figures");
  figure->add_option("id", figure_id, "figure number 1..9")->required();
  figure->add_option("--k-list", k_list, "override the k values for figures 5-9")
      ->delimiter(',');
  figure->add_flag("--full-scale", full_scale, "extend figures 3, 4, 8, 9 to k = 10000");
  figure->add_option("--jobs", jobs);
  figure->add_option("--output", output, "output path (default figure_N.csv)");
  figure->callback([&] {
    if (figure_id < 1 || figure_id > 9) die("figure id must be in 1..9");
    const std::string path =
        output.empty() ? ("figure_" + std::to_string(figure_id) + ".csv") : output;
    switch (figure_id) {
      case 1: { // mean against the median for k = 20, nu = 0..40
        Csv csv{"k", "nu", "lambda_star", "mu_star"};
        for (const auto& r : run_nu_mu(20, 40, jobs)) {
          csv.row(r.k, r.nu, r.lambda_star, r.mu_star);
        }
        emit(path, csv.body);
        break;
      }
      case 2: { // lambda_star against k at nu = k, k in [2, 100]
        Csv csv{"k", "lambda_star"};
        for (const auto& r : nu_eq_k_sweep(100)) csv.row(r.k, r.lambda_star);
        emit(path, csv.body);
        break;
      }
      case 3: { // mu_star against k at nu = k
        Csv csv{"k", "mu_star"};
        for (const auto& r : nu_eq_k_sweep(full_scale ? 10000 : 2000)) csv.row(r.k, r.mu_star);
        emit(path, csv.body);
        break;
      }
      case 4: { // residual of the published delta_k fit
        Csv csv{"k", "mu_minus_k", "delta_fit", "residual"};
        const poik_delta_fit pf = poik_paper_delta_fit();
        for (const auto& r : nu_eq_k_sweep(full_scale ? 10000 : 2000)) {
          double fit = 0;
          check(poik_delta_k_eval(&pf, r.k, &fit));
          const double delta = r.mu_star - static_cast<double>(r.k);
          csv.row(r.k, delta, fit, delta - fit);
        }
        emit(path, csv.body);
        break;
      }
      case 5:   // mu/(k+1) against nu/k
      case 6: { // residual of the published series coefficients
        if (k_list.empty()) k_list = {100, 500, 1000, 2000};
        const SeriesData d = collect_series_samples(k_list, points);
        const poik_series_fit pf = poik_paper_series_fit();
        Csv csv = figure_id == 5 ? Csv{"k", "nu", "nu_over_k", "mu_scaled"}
                                 : Csv{"k", "nu", "nu_over_k", "residual"};
        for (size_t i = 0; i < d.ks.size(); ++i) {
          const double x = static_cast<double>(d.nus[i]) / static_cast<double>(d.ks[i]);
          const double scaled = d.mus[i] / (static_cast<double>(d.ks[i]) + 1.0);
          if (figure_id == 5) {
            csv.row(d.ks[i], d.nus[i], x, scaled);
          } else {
            double pred = 0;
            check(poik_mu_series_eval(&pf, d.ks[i], d.nus[i], &pred));
            csv.row(d.ks[i], d.nus[i], x,
                    scaled - pred / (static_cast<double>(d.ks[i]) + 1.0));
          }
        }
        emit(path, csv.body);
        break;
      }
      case 7: { // (base_median - median)/k against n/k, k in {100..500}
        if (k_list.empty()) k_list = {100, 200, 300, 400, 500};
        Csv csv = sweep_csv_header();
        for (int64_t kk : k_list) append_sweep_rows(csv, run_base_median(kk, -1, 5 * kk, jobs));
        emit(path, csv.body);
        break;
      }
      case 8:   // same collapse at k in the thousands
      case 9: { // zoom: n/k <= 5
        if (k_list.empty()) {
          k_list = full_scale ? std::vector<int64_t>{1000, 2000, 5000, 10000}
                              : std::vector<int64_t>{1000, 2000};
        }
        const int64_t span = figure_id == 8 ? 8 : 5;
        Csv csv = sweep_csv_header();
        for (int64_t kk : k_list) {
          append_sweep_rows(csv, run_base_median(kk, -1, span * kk, jobs));
        }
        emit(path, csv.body);
        break;
      }
    }
  });

  // ---- verify ----
  std::string level = "quick";
  uint64_t seed = seed_default();
  auto* verify = app.add_subcommand("verify", "Cross-validate the analytic paths and sampler");
  verify->add_option("level", level, "quick (seconds) or full (minutes)")
      ->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--seed", seed, "sampler seed (default POIK_SEED or built-in)");
  verify->callback([&] {
    int failures = 0;
    check(poik_verify(level == "full" ? 1 : 0, seed,
                      [](const char* line, void*) { std::printf("%s\n", line); }, nullptr,
                      &failures));
    std::exit(failures == 0 ? 0 : 1);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return 0;
}
