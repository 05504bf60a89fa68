#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dist_core.hpp"

namespace poik::oracle {

// Ground-truth pmf at desk scale: coefficients of
// exp(-k*lambda) * exp(lambda*(x + ... + x^k)) up to x^n_max, obtained by
// exponentiating the polynomial through repeated Cauchy products of the exp
// Taylor series. All terms are positive, so there is no cancellation and the
// result is independent of both the recurrence and the combinatorial sums.
// Guard: k*lambda <= 50 and n_max <= 5000.
PmfTable pmf_by_convolution(const Params& p, int64_t n_max);

struct SampleBatch {
  Params params;
  uint64_t seed;
  std::vector<int64_t> values;
};

// `count` draws of Y = sum_{i=1}^{k} i*N_i with the N_i independent
// Poisson(lambda), from a seeded mt19937_64. Identical (params, seed, count)
// yields identical values on any conforming platform: uniforms are built from
// raw 64-bit outputs, and the Poisson sampler is cdf inversion for
// lambda < 10 and Hormann's transformed rejection (PTRS) above.
SampleBatch sample(const Params& p, uint64_t seed, int64_t count);

// Fraction of batch values <= n; n < 0 counts as below the support.
double empirical_cdf(const SampleBatch& batch, int64_t n);

// Single Poisson(lambda) draw used by sample(); exposed for tests.
int64_t poisson_draw(double lambda, std::mt19937_64& rng);

} // namespace poik::oracle
