#include "scaling_fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "error.hpp"
#include "lsq.hpp"
#include "numeric.hpp"

namespace poik {

int64_t base_median(int64_t n, int64_t k) {
  if (n < 0) raise(errc::invalid_argument, "base_median: n must be >= 0");
  if (k < 1) raise(errc::invalid_argument, "base_median: k must be >= 1");
  return n - (k + 4) / 8;
}

int64_t mode_conjecture(int64_t n, int64_t k) {
  if (k < 1) raise(errc::invalid_argument, "mode_conjecture: k must be >= 1");
  const int64_t two_kappa = k * (k + 1);
  if (n < two_kappa) {
    raise(errc::domain_error, "mode_conjecture: formula is only claimed for n >= 2*kappa");
  }
  return n - (3 * k + 5) / 8;
}

double delta_k_eval(const DeltaFit& fit, int64_t k) {
  if (k < 1) raise(errc::invalid_argument, "delta_k_eval: k must be >= 1");
  const double kd = static_cast<double>(k);
  return fit.slope * kd + fit.intercept + fit.inv_k_coefficient / kd;
}

DeltaFit paper_delta_fit() { return DeltaFit{0.155752, 0.57765625, -1.0 / 16.0}; }

DeltaFit fit_delta_k(std::span<const DeltaSample> samples) {
  std::set<int64_t> distinct;
  for (const auto& s : samples) distinct.insert(s.k);
  if (samples.size() < 3 || distinct.size() < 3) {
    raise(errc::singular_system, "fit_delta_k: need >= 3 samples with distinct k");
  }
  const size_t m = samples.size();
  std::vector<std::vector<double>> cols(3, std::vector<double>(m));
  std::vector<double> y(m);
  for (size_t i = 0; i < m; ++i) {
    const double kd = static_cast<double>(samples[i].k);
    cols[0][i] = kd;
    cols[1][i] = 1.0;
    cols[2][i] = 1.0 / kd;
    y[i] = samples[i].mu_star - kd;
  }
  const std::vector<double> beta = lsq_solve(std::move(cols), std::move(y));
  return DeltaFit{beta[0], beta[1], beta[2]};
}

SeriesFit paper_series_fit() {
  SeriesFit f;
  f.a0 = 0.5 * M_LN2;
  f.a1 = {0.335, -0.014};
  f.a2 = {0.356, 0.055};
  f.a3 = {0.123, -0.7};
  return f;
}

double mu_series_eval(const SeriesFit& fit, int64_t k, int64_t nu) {
  if (k < 1) raise(errc::invalid_argument, "mu_series_eval: k must be >= 1");
  if (nu < 0 || nu > k) {
    raise(errc::domain_error, "mu_series_eval: series covers nu in [0, k]");
  }
  const double k1 = static_cast<double>(k) + 1.0;
  const double x = static_cast<double>(nu) / static_cast<double>(k);
  const double a1 = fit.a1.constant + fit.a1.inv_k1 / k1;
  const double a2 = fit.a2.constant + fit.a2.inv_k1 / k1;
  const double a3 = fit.a3.constant + fit.a3.inv_k1 / k1;
  return k1 * (fit.a0 + x * (a1 + x * (a2 + x * a3)));
}

SeriesFit fit_mu_series(std::span<const SeriesSample> samples) {
  std::set<int64_t> distinct_k;
  std::set<double> distinct_x;
  for (const auto& s : samples) {
    if (s.k < 1 || s.nu < 0 || s.nu > s.k) {
      raise(errc::invalid_argument, "fit_mu_series: samples must satisfy 0 <= nu <= k");
    }
    if (s.nu == 0) continue;
    distinct_k.insert(s.k);
    distinct_x.insert(static_cast<double>(s.nu) / static_cast<double>(s.k));
  }
  if (distinct_k.size() < 2 || distinct_x.size() < 4) {
    raise(errc::singular_system,
          "fit_mu_series: need >= 2 distinct k and >= 4 distinct nonzero nu/k values");
  }
  // nu = 0 rows carry no information (a0 is pinned, the model vanishes there)
  // and are skipped. Rows are weighted by 1/sqrt(x): the series is fitted in
  // its divided form y/x = a1 + a2 x + a3 x^2, which keeps the small-nu/k end
  // from being swamped by the x -> 1 region.
  std::vector<std::vector<double>> cols(6);
  std::vector<double> y;
  const double a0 = 0.5 * M_LN2;
  for (const auto& s : samples) {
    if (s.nu == 0) continue;
    const double k1 = static_cast<double>(s.k) + 1.0;
    const double x = static_cast<double>(s.nu) / static_cast<double>(s.k);
    const double w = 1.0 / std::sqrt(x);
    const double x2 = x * x;
    cols[0].push_back(w * x);
    cols[1].push_back(w * x2);
    cols[2].push_back(w * x2 * x);
    cols[3].push_back(w * x / k1);
    cols[4].push_back(w * x2 / k1);
    cols[5].push_back(w * x2 * x / k1);
    y.push_back(w * (s.mu_star / k1 - a0));
  }
  const std::vector<double> beta = lsq_solve(std::move(cols), std::move(y));
  SeriesFit f;
  f.a0 = a0;
  f.a1 = {beta[0], beta[3]};
  f.a2 = {beta[1], beta[4]};
  f.a3 = {beta[2], beta[5]};
  return f;
}

namespace {

ResidualReport summarize(std::vector<double> abscissa, std::vector<double> residual) {
  ResidualReport rep;
  NeumaierSum total;
  for (double r : residual) {
    rep.max_abs = std::max(rep.max_abs, std::abs(r));
    total.add(r);
  }
  rep.bias = residual.empty() ? 0.0 : total.value() / static_cast<double>(residual.size());
  rep.abscissa = std::move(abscissa);
  rep.residual = std::move(residual);
  return rep;
}

} // namespace

ResidualReport residual_report(const DeltaFit& fit, std::span<const DeltaSample> samples) {
  if (samples.empty()) raise(errc::invalid_argument, "residual_report: no samples");
  std::vector<double> xs, rs;
  xs.reserve(samples.size());
  rs.reserve(samples.size());
  for (const auto& s : samples) {
    xs.push_back(static_cast<double>(s.k));
    rs.push_back(s.mu_star - static_cast<double>(s.k) - delta_k_eval(fit, s.k));
  }
  return summarize(std::move(xs), std::move(rs));
}

ResidualReport residual_report(const SeriesFit& fit, std::span<const SeriesSample> samples) {
  if (samples.empty()) raise(errc::invalid_argument, "residual_report: no samples");
  std::vector<double> xs, rs;
  xs.reserve(samples.size());
  rs.reserve(samples.size());
  for (const auto& s : samples) {
    const double k1 = static_cast<double>(s.k) + 1.0;
    xs.push_back(static_cast<double>(s.nu) / static_cast<double>(s.k));
    rs.push_back(s.mu_star / k1 - mu_series_eval(fit, s.k, s.nu) / k1);
  }
  return summarize(std::move(xs), std::move(rs));
}

int64_t default_sweep_n_lo(int64_t k) {
  return static_cast<int64_t>(std::ceil(0.5 * static_cast<double>(k + 1) * M_LN2));
}

namespace {

// Run fn(i) for i in [0, count) over `jobs` threads; fn writes to disjoint
// output slots, so ordering stays deterministic under any schedule.
template <typename Fn>
void parallel_for(int64_t count, int jobs, const Fn& fn) {
  if (jobs <= 1 || count < 2) {
    for (int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int nthreads = static_cast<int>(std::min<int64_t>(jobs, count));
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::atomic<int64_t> next{0};
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int64_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace

std::vector<SweepRecord> sweep_base_median_diff(int64_t k, int64_t n_lo, int64_t n_hi,
                                                int jobs) {
  if (k < 1) raise(errc::invalid_argument, "sweep_base_median_diff: k must be >= 1");
  if (n_lo < 0) n_lo = default_sweep_n_lo(k);
  if (n_hi < n_lo) raise(errc::invalid_argument, "sweep_base_median_diff: empty n range");
  const double kappa = static_cast<double>(k) * static_cast<double>(k + 1) / 2.0;
  const int64_t count = n_hi - n_lo + 1;
  std::vector<SweepRecord> out(static_cast<size_t>(count));
  parallel_for(count, jobs, [&](int64_t i) {
    const int64_t n = n_lo + i;
    const double lambda = static_cast<double>(n) / kappa;
    SweepRecord rec;
    rec.k = k;
    rec.n = n;
    rec.median = median(Params(k, lambda));
    rec.base_median = base_median(n, k);
    rec.scaled_diff =
        static_cast<double>(rec.base_median - rec.median) / static_cast<double>(k);
    rec.scaled_mean = static_cast<double>(n) / static_cast<double>(k);
    out[static_cast<size_t>(i)] = rec;
  });
  return out;
}

std::vector<MedianSolveResult> sweep_nu_mu(int64_t k, int64_t nu_hi, int jobs) {
  if (k < 1) raise(errc::invalid_argument, "sweep_nu_mu: k must be >= 1");
  if (nu_hi < 0) raise(errc::invalid_argument, "sweep_nu_mu: nu_hi must be >= 0");
  std::vector<MedianSolveResult> out(static_cast<size_t>(nu_hi) + 1);
  parallel_for(nu_hi + 1, jobs,
               [&](int64_t nu) { out[static_cast<size_t>(nu)] = solve_lambda_star(k, nu); });
  return out;
}

} // namespace poik
