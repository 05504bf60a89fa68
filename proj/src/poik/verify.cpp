#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "dist_core.hpp"
#include "median_solver.hpp"
#include "oracle.hpp"
#include "scaling_fit.hpp"

namespace poik {

namespace {

struct Reporter {
  const std::function<void(const std::string&)>& log;
  int failures = 0;

  void check(bool ok, const std::string& name, const std::string& detail = "") {
    std::ostringstream line;
    line << (ok ? "PASS " : "FAIL ") << name;
    if (!ok && !detail.empty()) line << " — " << detail;
    log(line.str());
    if (!ok) ++failures;
  }
};

bool rel_close(double a, double b, double tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

const char* branch_name(int64_t n, int64_t k) {
  if (n == 0) return "n = 0 branch";
  if (n <= k) return "1 <= n <= k branch";
  return "n > k alternating branch";
}

void three_way_agreement(Reporter& rep, bool full) {
  const std::vector<int64_t> ks = full ? std::vector<int64_t>{1, 2, 3, 5, 10, 20}
                                       : std::vector<int64_t>{1, 2, 3, 5};
  bool ok = true;
  std::string detail;
  for (int64_t k : ks) {
    for (double lambda : {0.1, 0.5, 1.0, 2.0}) {
      if (static_cast<double>(k) * lambda > (full ? 20.0 : 5.0)) continue;
      const Params p(k, lambda);
      const int64_t n_hi = std::min<int64_t>(full ? 300 : 150, 4 * p.kappa());
      const PmfTable table = pmf_table(p, n_hi);
      const PmfTable conv = oracle::pmf_by_convolution(p, n_hi);
      for (int64_t n = 0; n <= n_hi && ok; ++n) {
        const double a = pmf_combinatorial(p, n);
        const double b = table.prob(n);
        const double c = conv.prob(n);
        if (b < 1e-290 && c < 1e-290) continue; // below meaningful double resolution
        if (!rel_close(a, b, 1e-10) || !rel_close(a, c, 1e-10) || !rel_close(b, c, 1e-10)) {
          ok = false;
          std::ostringstream d;
          d << "mismatch at k=" << k << " lambda=" << lambda << " n=" << n << " ("
            << branch_name(n, k) << "): combinatorial=" << a << " recurrence=" << b
            << " series-oracle=" << c;
          detail = d.str();
        }
      }
    }
  }
  rep.check(ok, "three-way pmf agreement (combinatorial / recurrence / series oracle)", detail);
}

void median_formula_sweep(Reporter& rep, bool full) {
  const int64_t k_hi = full ? 40 : 12;
  const int64_t span = full ? 4 : 3;
  bool ok = true;
  std::string detail;
  for (int64_t k = 2; k <= k_hi && ok; ++k) {
    const int64_t kappa = k * (k + 1) / 2;
    for (int64_t n = kappa; n <= span * kappa && ok; ++n) {
      const double lambda = static_cast<double>(n) / static_cast<double>(kappa);
      const int64_t med = median(Params(k, lambda));
      const int64_t expected = base_median(n, k);
      if (med != expected) {
        ok = false;
        std::ostringstream d;
        d << "median(k=" << k << ", lambda=" << lambda << ") = " << med << ", formula gives "
          << expected;
        detail = d.str();
      }
    }
  }
  rep.check(ok, "pinned-mean median formula sweep (n - floor((k+4)/8))", detail);
}

void mode_formula_sweep(Reporter& rep, bool full) {
  const int64_t k_hi = full ? 25 : 8;
  const int64_t span = full ? 5 : 4;
  bool ok = true;
  std::string detail;
  for (int64_t k = 2; k <= k_hi && ok; ++k) {
    const int64_t kappa = k * (k + 1) / 2;
    for (int64_t n = 2 * kappa; n <= span * kappa && ok; ++n) {
      const double lambda = static_cast<double>(n) / static_cast<double>(kappa);
      const ModeSet m = mode(Params(k, lambda));
      const int64_t expected = mode_conjecture(n, k);
      if (!std::binary_search(m.modes.begin(), m.modes.end(), expected)) {
        ok = false;
        std::ostringstream d;
        d << "mode set at k=" << k << ", lambda=" << lambda << " misses " << expected;
        detail = d.str();
      }
    }
  }
  rep.check(ok, "pinned-mean mode formula sweep (n - floor((3k+5)/8))", detail);
}

void normalization(Reporter& rep, bool full) {
  std::vector<int64_t> ks{1, 10, 100};
  if (full) ks.push_back(1000);
  bool ok = true;
  std::string detail;
  for (int64_t k : ks) {
    for (double lambda : {0.1, 1.0}) {
      const Params p(k, lambda);
      const PmfTable t = pmf_table(p, support_bound(p));
      const double total = t.cdf(t.n_max());
      if (std::abs(total - 1.0) > 1e-10) {
        ok = false;
        std::ostringstream d;
        d << "sum of pmf at k=" << k << ", lambda=" << lambda << " is " << total;
        detail = d.str();
      }
    }
  }
  rep.check(ok, "pmf normalization over the support bound", detail);
}

void boundary_round_trip(Reporter& rep, bool full) {
  std::vector<std::pair<int64_t, int64_t>> cases{{5, 0}, {10, 3}, {20, 7}, {12, 12}};
  if (full) {
    cases.emplace_back(50, 20);
    cases.emplace_back(30, 45); // generic path, nu > k
  }
  bool ok = true;
  std::string detail;
  for (const auto& [k, nu] : cases) {
    const MedianSolveResult r = solve_lambda_star(k, nu);
    if (!verify_boundary(r)) {
      ok = false;
      detail = "boundary check failed at k=" + std::to_string(k) + " nu=" + std::to_string(nu);
    }
  }
  rep.check(ok, "boundary-rate solutions flip the median across lambda_star", detail);
}

void sampler_moments(Reporter& rep, bool full, uint64_t seed) {
  const int64_t count = full ? 500000 : 200000;
  const Params p(5, 0.4);
  const auto batch = oracle::sample(p, seed, count);
  double m1 = 0.0;
  for (int64_t v : batch.values) m1 += static_cast<double>(v);
  m1 /= static_cast<double>(count);
  double m2 = 0.0;
  for (int64_t v : batch.values) {
    const double d = static_cast<double>(v) - m1;
    m2 += d * d;
  }
  m2 /= static_cast<double>(count - 1);
  const double mu = mean(p);
  const double var = variance(p);
  const double mean_band = 5.0 * std::sqrt(var / static_cast<double>(count));
  const double var_band = 8.0 * var * std::sqrt(2.0 / static_cast<double>(count - 1));
  std::ostringstream d;
  d << "sample mean " << m1 << " (expect " << mu << " +- " << mean_band << "), variance " << m2
    << " (expect " << var << " +- " << var_band << ")";
  rep.check(std::abs(m1 - mu) <= mean_band && std::abs(m2 - var) <= var_band,
            "seeded sampler moments vs closed forms", d.str());

  if (full) {
    const Params p2(5, 2.0);
    const auto b2 = oracle::sample(p2, seed + 1, 200000);
    std::vector<int64_t> sorted = b2.values;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const int64_t emp_median = sorted[sorted.size() / 2];
    rep.check(emp_median == 29, "empirical median at (k=5, lambda=2)",
              "got " + std::to_string(emp_median));
  }
}

} // namespace

int run_verify(const VerifyOptions& opts, const std::function<void(const std::string&)>& log) {
  Reporter rep{log};
  three_way_agreement(rep, opts.full);
  median_formula_sweep(rep, opts.full);
  mode_formula_sweep(rep, opts.full);
  normalization(rep, opts.full);
  boundary_round_trip(rep, opts.full);
  sampler_moments(rep, opts.full, opts.seed);
  std::ostringstream summary;
  summary << (rep.failures == 0 ? "OK" : "FAILED") << " — " << rep.failures << " failing check"
          << (rep.failures == 1 ? "" : "s") << " (" << (opts.full ? "full" : "quick") << ")";
  log(summary.str());
  return rep.failures;
}

} // namespace poik
