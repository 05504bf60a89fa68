#pragma once

#include <cstdint>
#include <vector>

#include "error.hpp"

namespace poik {

// Parameters (k, lambda) of a Poisson distribution of order k: the compound
// Poisson law with pgf exp(-k*lambda) * exp(lambda*(x + x^2 + ... + x^k)).
// Reduces to the standard Poisson distribution at k = 1.
struct Params {
  int64_t k;
  double lambda;

  Params(int64_t k_, double lambda_);

  // k(k+1)/2, exact in integer arithmetic. The mean equals kappa*lambda.
  int64_t kappa() const { return k * (k + 1) / 2; }
};

double mean(const Params& p);     // k(k+1)/2 * lambda
double variance(const Params& p); // k(k+1)(2k+1)/6 * lambda

// ceil(mean + 12*sigma + 32); the pmf mass beyond this index is < 1e-12.
int64_t support_bound(const Params& p);

inline constexpr int64_t kDefaultTableCap = 10'000'000;

// Table of p_0..p_n_max. Entries are stored as mantissas tied to the
// log-scale of the rescaling block they were produced in, so construction
// neither underflows nor overflows even when k*lambda is of order 1e5.
class PmfTable {
public:
  static PmfTable build(const Params& p, int64_t n_max, int64_t entry_cap = kDefaultTableCap);

  // Assemble from externally computed mantissas m_n with p_n = m_n * exp(log_scale).
  // Used by the series-exponentiation oracle; cdf prefix sums are rebuilt here.
  static PmfTable from_mantissas(const Params& p, std::vector<double> mantissas,
                                 double log_scale);

  const Params& params() const { return params_; }
  int64_t n_max() const { return static_cast<int64_t>(pmf_mant_.size()) - 1; }

  double prob(int64_t n) const;     // p_n (0 if it underflows the double range)
  double log_prob(int64_t n) const; // log p_n; -inf where p_n is flushed to zero
  double cdf(int64_t n) const;      // sum of p_0..p_n, clamped to [0, 1]

  double mantissa(int64_t n) const { return pmf_mant_[check(n)]; }
  double log_scale_of(int64_t n) const { return block_log_scale(block_of(n)); }

private:
  PmfTable() : params_(1, 1.0) {}

  struct Block {
    int64_t first; // first index produced under this scale
    double log_scale;
  };

  size_t check(int64_t n) const;
  size_t block_of(int64_t n) const;
  double block_log_scale(size_t b) const { return blocks_[b].log_scale; }

  Params params_;
  std::vector<double> pmf_mant_;
  std::vector<double> cdf_mant_;
  std::vector<Block> blocks_;
};

PmfTable pmf_table(const Params& p, int64_t n_max, int64_t entry_cap = kDefaultTableCap);

// Reference pmf evaluated straight from the published combinatorial sums
// (the n = 0, 1 <= n <= k, and n > k branches with the alternating block
// correction). Validation path: requires k*lambda <= 700 and is only
// cancellation-safe at desk scale; the recurrence table is the scalable path.
double pmf_combinatorial(const Params& p, int64_t n);

// CDF via the table, range-checked.
double cdf(const PmfTable& table, int64_t n);

// Smallest nu with P(Y <= nu) >= 1/2. Streams the recurrence and stops at the
// crossing, so cost is O(median), not O(support).
int64_t median(const Params& p);

// P(Y <= n) without materializing a table.
double cdf_value_at(const Params& p, int64_t n);

struct ModeSet {
  std::vector<int64_t> modes; // sorted; all entries within 1e-12 of the peak
  double peak_probability;
};

// Argmax set of the pmf over [0, support_bound]. Ties within relative 1e-12
// are all reported (exact float ties occur at k = 1 with integer lambda).
ModeSet mode(const Params& p);

} // namespace poik
