#include "oracle.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "numeric.hpp"

namespace poik::oracle {

PmfTable pmf_by_convolution(const Params& p, int64_t n_max) {
  if (n_max < 0) raise(errc::invalid_argument, "pmf_by_convolution: n_max must be >= 0");
  const double klam = static_cast<double>(p.k) * p.lambda;
  if (klam > 50.0 || n_max > 5000) {
    raise(errc::guard_exceeded,
          "pmf_by_convolution is a desk-scale oracle: requires k*lambda <= 50 and "
          "n_max <= 5000");
  }

  // (k*lambda)^m / m! bounds the exp-series tail across all coefficients at
  // once; cutting at 1e-30 keeps the oracle's own tail entries meaningful
  // relative to 1e-10 comparisons.
  int64_t depth = 1;
  for (double term = klam; term >= 1e-30 && depth < 5000; ++depth) {
    term *= klam / static_cast<double>(depth + 1);
  }

  const size_t len = static_cast<size_t>(n_max) + 1;
  std::vector<double> acc(len, 0.0), power(len, 0.0), next(len, 0.0);
  acc[0] = 1.0;   // g^0 / 0!
  power[0] = 1.0; // running g^m / m!
  for (int64_t m = 1; m <= depth; ++m) {
    std::fill(next.begin(), next.end(), 0.0);
    // next = power * g / m, where g = lambda * (x + x^2 + ... + x^k)
    for (size_t d = 0; d < len; ++d) {
      const double c = power[d];
      if (c == 0.0) continue;
      const size_t top = std::min<size_t>(static_cast<size_t>(p.k), len - 1 - d);
      for (size_t i = 1; i <= top; ++i) {
        next[d + i] += c * p.lambda / static_cast<double>(m);
      }
    }
    power.swap(next);
    for (size_t d = 0; d < len; ++d) acc[d] += power[d];
  }
  // acc holds p_n * e^{k*lambda}; hand it over as mantissas at log-scale -k*lambda.
  return PmfTable::from_mantissas(p, std::move(acc), -klam);
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Transformed rejection with squeeze (Hormann's PTRS), for lambda >= 10.
int64_t poisson_ptrs(double lambda, std::mt19937_64& rng) {
  const double log_lambda = std::log(lambda);
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = -lambda + kf * log_lambda - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<int64_t>(kf);
  }
}

// cdf inversion for small lambda.
int64_t poisson_inversion(double lambda, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double p = std::exp(-lambda);
  double cum = p;
  int64_t n = 0;
  while (u > cum && n < 1100) {
    ++n;
    p *= lambda / static_cast<double>(n);
    cum += p;
  }
  return n;
}

} // namespace

int64_t poisson_draw(double lambda, std::mt19937_64& rng) {
  return lambda < 10.0 ? poisson_inversion(lambda, rng) : poisson_ptrs(lambda, rng);
}

SampleBatch sample(const Params& p, uint64_t seed, int64_t count) {
  if (count < 1) raise(errc::invalid_argument, "sample: count must be >= 1");
  SampleBatch batch{p, seed, {}};
  batch.values.reserve(static_cast<size_t>(count));
  std::mt19937_64 rng(seed);
  for (int64_t c = 0; c < count; ++c) {
    int64_t y = 0;
    for (int64_t i = 1; i <= p.k; ++i) {
      y += i * poisson_draw(p.lambda, rng);
    }
    batch.values.push_back(y);
  }
  return batch;
}

double empirical_cdf(const SampleBatch& batch, int64_t n) {
  if (batch.values.empty()) raise(errc::invalid_argument, "empirical_cdf: empty batch");
  if (n < 0) return 0.0;
  size_t hits = 0;
  for (int64_t v : batch.values) {
    if (v <= n) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(batch.values.size());
}

} // namespace poik::oracle
