#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "median_solver.hpp"

namespace poik {

// "Base median": the large-rate median formula n - floor((k+4)/8) applied as
// a reference line at mean pinned to the integer n, also outside the n >= kappa
// domain where it is exact.
int64_t base_median(int64_t n, int64_t k);

// Conjectured mode n - floor((3k+5)/8) at mean pinned to n; only claimed for
// n >= 2*kappa (DomainError below that).
int64_t mode_conjecture(int64_t n, int64_t k);

// Mean-minus-median gap at the nu = k boundary, parameterized as
// slope*k + intercept + inv_k_coefficient/k.
struct DeltaFit {
  double slope = 0.0;
  double intercept = 0.0;
  double inv_k_coefficient = 0.0;
};

double delta_k_eval(const DeltaFit& fit, int64_t k);

// Reference coefficients 0.155752*k + 0.57765625 - 1/(16k).
DeltaFit paper_delta_fit();

struct DeltaSample {
  int64_t k;
  double mu_star; // mean at the nu = k boundary
};

// Least squares of mu_star - k on the basis {k, 1, 1/k}.
// Needs >= 3 samples with >= 3 distinct k.
DeltaFit fit_delta_k(std::span<const DeltaSample> samples);

// Scaled-mean series mu_{nu,*}/(k+1) = a0 + a1 (nu/k) + a2 (nu/k)^2 + a3 (nu/k)^3
// with a_i = const_i + inv_i/(k+1) for i >= 1 and a0 = (ln 2)/2 pinned (exact).
struct SeriesCoeff {
  double constant = 0.0;
  double inv_k1 = 0.0; // coefficient of 1/(k+1)
};

struct SeriesFit {
  double a0 = 0.0;
  SeriesCoeff a1, a2, a3;
};

SeriesFit paper_series_fit();

// Prediction of mu_{nu,*} (unscaled).
double mu_series_eval(const SeriesFit& fit, int64_t k, int64_t nu);

struct SeriesSample {
  int64_t k;
  int64_t nu;
  double mu_star;
};

// Least squares of mu/(k+1) - (ln 2)/2 over {x^i, x^i/(k+1)}, i = 1..3, with
// x = nu/k, weighted by 1/x (the fit of the divided series y/x). nu = 0 rows
// are pinned by a0 and skipped. Needs >= 2 distinct k and >= 4 distinct
// nonzero x values.
SeriesFit fit_mu_series(std::span<const SeriesSample> samples);

struct ResidualReport {
  std::vector<double> abscissa;
  std::vector<double> residual;
  double max_abs = 0.0;
  double bias = 0.0; // mean residual
};

// Residuals (mu_star - k) - delta_k_eval(k), abscissa k.
ResidualReport residual_report(const DeltaFit& fit, std::span<const DeltaSample> samples);
// Residuals mu_star/(k+1) - (a0 + a1 x + a2 x^2 + a3 x^3), abscissa nu/k.
ResidualReport residual_report(const SeriesFit& fit, std::span<const SeriesSample> samples);

// One row of a mean-pinned sweep: lambda = n/kappa, median from dist_core,
// base median from the formula.
struct SweepRecord {
  int64_t k = 0;
  int64_t n = 0;
  int64_t median = 0;
  int64_t base_median = 0;
  double scaled_diff = 0.0; // (base_median - median)/k
  double scaled_mean = 0.0; // n/k
};

// First n at which the median leaves zero: ceil((k+1) ln2 / 2).
int64_t default_sweep_n_lo(int64_t k);

// Records for integer means n in [n_lo, n_hi]; pass n_lo < 0 for the default
// start. Rows are independent and computed on `jobs` threads, output ordering
// is by n regardless of scheduling.
std::vector<SweepRecord> sweep_base_median_diff(int64_t k, int64_t n_lo, int64_t n_hi,
                                                int jobs = 1);

// Boundary solutions for nu = 0..nu_hi at fixed k (the mean-vs-median curve).
// Uses the closed equation for nu <= k and cdf bisection beyond.
std::vector<MedianSolveResult> sweep_nu_mu(int64_t k, int64_t nu_hi, int jobs = 1);

} // namespace poik
