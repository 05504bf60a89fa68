#pragma once

// Test-side statistical helpers: regularized incomplete gamma and a pooled
// chi-squared goodness-of-fit of a sample batch against a pmf table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "poik/dist_core.hpp"

namespace testing_support {

// Q(a, x) = Gamma(a, x)/Gamma(a), series for x < a+1, continued fraction above.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Pearson chi-squared p-value of `values` against the analytic pmf, with
// adjacent outcomes pooled until each bin expects >= 5 counts.
inline double chi2_gof_pvalue(const poik::Params& p, const std::vector<int64_t>& values) {
  const poik::PmfTable t = poik::pmf_table(p, poik::support_bound(p));
  const double n = static_cast<double>(values.size());
  std::vector<double> expected;
  std::vector<int64_t> upper; // inclusive bin edges
  double acc = 0.0;
  for (int64_t i = 0; i <= t.n_max(); ++i) {
    acc += t.prob(i) * n;
    if (acc >= 5.0) {
      expected.push_back(acc);
      upper.push_back(i);
      acc = 0.0;
    }
  }
  if (expected.empty()) return std::numeric_limits<double>::quiet_NaN();
  expected.back() += acc + (1.0 - t.cdf(t.n_max())) * n;
  upper.back() = std::numeric_limits<int64_t>::max();
  std::vector<double> observed(expected.size(), 0.0);
  for (int64_t v : values) {
    const size_t b = static_cast<size_t>(
        std::lower_bound(upper.begin(), upper.end(), v) - upper.begin());
    observed[b] += 1.0;
  }
  double chi2 = 0.0;
  for (size_t b = 0; b < expected.size(); ++b) {
    const double d = observed[b] - expected[b];
    chi2 += d * d / expected[b];
  }
  const double dof = static_cast<double>(expected.size()) - 1.0;
  return gamma_q(dof / 2.0, chi2 / 2.0);
}

} // namespace testing_support
