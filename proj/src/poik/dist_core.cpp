#include "dist_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "numeric.hpp"

namespace poik {

namespace {

// Mantissas are renormalized by an exact power of two once they pass this
// threshold; 2^-830 ~ 1.4e-250 keeps the working band centred in double range.
constexpr double kRescaleThreshold = 1e250;
constexpr int kRescaleShift = 830;
const double kRescaleLog = kRescaleShift * M_LN2;

// Relative slack on the cdf >= 1/2 test. Rates that sit exactly on a median
// boundary (k*lambda == ln 2 up to input rounding) must resolve to the
// boundary side.
constexpr double kHalfSlack = 1e-13;

// Streams p_0, p_1, ... via p_n = (lambda/n) * sum_{j=1}^{min(n,k)} j*p_{n-j}
// (differentiate the pgf). The weighted window sum S and the plain window sum
// T are advanced in O(1) per step and recomputed exactly from the stored
// window every k steps, or sooner if S has decayed enough that incremental
// error could surface.
class RecurrenceStepper {
public:
  explicit RecurrenceStepper(const Params& p)
      : params_(p),
        window_(static_cast<size_t>(p.k), 0.0),
        rebuild_cadence_(std::max<int64_t>(p.k, 32)) {
    log_scale_ = -static_cast<double>(p.k) * p.lambda;
    window_[0] = 1.0; // p_0 in mantissa units
    mant_ = 1.0;
    s_weighted_ = 1.0;
    t_plain_ = 1.0;
    seg_max_s_ = 1.0;
    cdf_.add(1.0);
    update_half_threshold();
  }

  int64_t n() const { return n_; }
  double mantissa() const { return mant_; }
  double log_scale() const { return log_scale_; }
  int block() const { return block_; }
  double cdf_mantissa() const { return cdf_.value(); }

  bool cdf_at_least_half() const { return cdf_.value() >= half_mant_ * (1.0 - kHalfSlack); }

  double cdf_true() const {
    const double v = cdf_.value();
    if (v <= 0.0) return 0.0;
    double out;
    if (log_scale_ > -690.0 && log_scale_ < 690.0) {
      out = v * std::exp(log_scale_);
    } else {
      out = std::exp(std::log(v) + log_scale_);
    }
    return std::clamp(out, 0.0, 1.0);
  }

  void advance() {
    const int64_t next = n_ + 1;
    double pv = (params_.lambda / static_cast<double>(next)) * s_weighted_;
    if (!(pv >= 0.0)) pv = 0.0;
    const size_t slot = static_cast<size_t>(next % params_.k);
    if (next < params_.k) {
      s_weighted_ += t_plain_ + pv;
      t_plain_ += pv;
    } else {
      const double old = window_[slot];
      s_weighted_ += pv + t_plain_ - static_cast<double>(params_.k + 1) * old;
      t_plain_ += pv - old;
    }
    window_[slot] = pv;
    mant_ = pv;
    cdf_.add(pv);
    n_ = next;
    while (mant_ > kRescaleThreshold) rescale_once();
    ++steps_since_rebuild_;
    seg_max_s_ = std::max(seg_max_s_, s_weighted_);
    if (steps_since_rebuild_ >= rebuild_cadence_ || s_weighted_ < 0.0 || t_plain_ < 0.0 ||
        (s_weighted_ > 0.0 && s_weighted_ < seg_max_s_ * 0x1p-7)) {
      rebuild_sums();
    }
  }

private:
  void rescale_once() {
    const double f = 0x1p-830;
    for (double& w : window_) w *= f;
    s_weighted_ *= f;
    t_plain_ *= f;
    mant_ *= f;
    seg_max_s_ *= f;
    cdf_.scale(f);
    log_scale_ += kRescaleLog;
    ++block_;
    update_half_threshold();
  }

  void update_half_threshold() {
    half_mant_ = (log_scale_ < -700.0) ? std::numeric_limits<double>::infinity()
                                       : 0.5 * std::exp(-log_scale_);
  }

  void rebuild_sums() {
    const int64_t m = std::min<int64_t>(n_ + 1, params_.k);
    NeumaierSum s, t;
    for (int64_t j = 1; j <= m; ++j) {
      const double v = window_[static_cast<size_t>((n_ + 1 - j) % params_.k)];
      s.add(static_cast<double>(j) * v);
      t.add(v);
    }
    s_weighted_ = s.value();
    t_plain_ = t.value();
    seg_max_s_ = s_weighted_;
    steps_since_rebuild_ = 0;
  }

  Params params_;
  std::vector<double> window_; // ring of the last k mantissas, p_i at slot i % k
  int64_t rebuild_cadence_;
  double log_scale_ = 0.0;
  double mant_ = 0.0;
  double s_weighted_ = 0.0;
  double t_plain_ = 0.0;
  double seg_max_s_ = 0.0;
  double half_mant_ = 0.0;
  NeumaierSum cdf_;
  int64_t n_ = 0;
  int64_t steps_since_rebuild_ = 0;
  int block_ = 0;
};

} // namespace

Params::Params(int64_t k_, double lambda_) : k(k_), lambda(lambda_) {
  if (k < 1) raise(errc::invalid_argument, "order k must be a positive integer");
  if (k > 2'000'000'000LL) raise(errc::invalid_argument, "order k too large");
  if (!std::isfinite(lambda) || !(lambda > 0.0)) {
    raise(errc::invalid_argument,
          "lambda must be positive and finite (lambda = 0 degenerates to a point mass at 0)");
  }
}

double mean(const Params& p) { return static_cast<double>(p.kappa()) * p.lambda; }

double variance(const Params& p) {
  return static_cast<double>(p.k) * static_cast<double>(p.k + 1) *
         static_cast<double>(2 * p.k + 1) / 6.0 * p.lambda;
}

int64_t support_bound(const Params& p) {
  return static_cast<int64_t>(std::ceil(mean(p) + 12.0 * std::sqrt(variance(p)) + 32.0));
}

PmfTable PmfTable::build(const Params& p, int64_t n_max, int64_t entry_cap) {
  if (n_max < 0) raise(errc::invalid_argument, "pmf_table: n_max must be >= 0");
  if (entry_cap <= 0) entry_cap = kDefaultTableCap;
  if (n_max + 1 > entry_cap) {
    raise(errc::allocation_bound, "pmf_table: n_max " + std::to_string(n_max) +
                                      " exceeds the entry cap " + std::to_string(entry_cap));
  }
  PmfTable t;
  t.params_ = p;
  t.pmf_mant_.reserve(static_cast<size_t>(n_max) + 1);
  t.cdf_mant_.reserve(static_cast<size_t>(n_max) + 1);
  RecurrenceStepper st(p);
  t.blocks_.push_back({0, st.log_scale()});
  t.pmf_mant_.push_back(st.mantissa());
  t.cdf_mant_.push_back(st.cdf_mantissa());
  for (int64_t n = 1; n <= n_max; ++n) {
    st.advance();
    if (st.block() + 1 > static_cast<int>(t.blocks_.size())) {
      t.blocks_.push_back({n, st.log_scale()});
    }
    t.pmf_mant_.push_back(st.mantissa());
    t.cdf_mant_.push_back(st.cdf_mantissa());
  }
  return t;
}

PmfTable PmfTable::from_mantissas(const Params& p, std::vector<double> mantissas,
                                  double log_scale) {
  if (mantissas.empty()) raise(errc::invalid_argument, "from_mantissas: empty table");
  PmfTable t;
  t.params_ = p;
  t.blocks_.push_back({0, log_scale});
  t.cdf_mant_.reserve(mantissas.size());
  NeumaierSum acc;
  for (double m : mantissas) {
    acc.add(m);
    t.cdf_mant_.push_back(acc.value());
  }
  t.pmf_mant_ = std::move(mantissas);
  return t;
}

size_t PmfTable::check(int64_t n) const {
  if (n < 0 || n > n_max()) {
    raise(errc::out_of_range, "table index " + std::to_string(n) + " outside [0, " +
                                  std::to_string(n_max()) + "]");
  }
  return static_cast<size_t>(n);
}

size_t PmfTable::block_of(int64_t n) const {
  size_t b = blocks_.size() - 1;
  while (b > 0 && blocks_[b].first > n) --b;
  return b;
}

double PmfTable::prob(int64_t n) const {
  const size_t i = check(n);
  const double m = pmf_mant_[i];
  if (m <= 0.0) return 0.0;
  const double ls = block_log_scale(block_of(n));
  if (ls > -690.0 && ls < 690.0) return m * std::exp(ls);
  return std::exp(std::log(m) + ls);
}

double PmfTable::log_prob(int64_t n) const {
  const size_t i = check(n);
  const double m = pmf_mant_[i];
  if (m <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(m) + block_log_scale(block_of(n));
}

double PmfTable::cdf(int64_t n) const {
  const size_t i = check(n);
  const double m = cdf_mant_[i];
  if (m <= 0.0) return 0.0;
  const double ls = block_log_scale(block_of(n));
  const double v = (ls > -690.0 && ls < 690.0) ? m * std::exp(ls) : std::exp(std::log(m) + ls);
  return std::clamp(v, 0.0, 1.0);
}

PmfTable pmf_table(const Params& p, int64_t n_max, int64_t entry_cap) {
  return PmfTable::build(p, n_max, entry_cap);
}

double cdf(const PmfTable& table, int64_t n) { return table.cdf(n); }

double pmf_combinatorial(const Params& p, int64_t n) {
  if (n < 0) raise(errc::invalid_argument, "pmf_combinatorial: n must be >= 0");
  const double klam = static_cast<double>(p.k) * p.lambda;
  if (klam > 700.0) {
    raise(errc::guard_exceeded,
          "pmf_combinatorial: k*lambda > 700; the exp(-k*lambda) prefactor leaves double "
          "range, use pmf_table");
  }
  if (n == 0) return std::exp(-klam);
  if (n <= p.k) {
    // sum_{j=1}^{n} C(n-1, j-1) lambda^j / j!, all terms positive; consecutive
    // terms differ by lambda*(n-j)/(j*(j+1)). Partial sums stay below
    // e^{k lambda} <= e^700.
    NeumaierSum sum;
    double t = p.lambda;
    sum.add(t);
    for (int64_t j = 1; j < n; ++j) {
      t *= p.lambda * static_cast<double>(n - j) / (static_cast<double>(j) * (j + 1));
      sum.add(t);
    }
    return std::exp(-klam) * sum.value();
  }

  // n > k: the main sum minus the alternating correction over
  // ell = floor(n/(k+1)) blocks. The pieces cancel far below their own
  // magnitude, so they are built and combined in scaled double-double; the
  // assembled bracket equals p_n * e^{k lambda} <= e^700.
  const int64_t ell = n / (p.k + 1);
  std::vector<ScaledDD> pieces;
  pieces.reserve(static_cast<size_t>(ell) + 1);
  {
    ScaledDD term = ScaledDD::from(p.lambda);
    ScaledDD acc = term;
    for (int64_t j = 1; j < n; ++j) {
      term.mul(p.lambda);
      term.mul(static_cast<double>(n - j));
      term.div(static_cast<double>(j) * static_cast<double>(j + 1));
      acc.add(term);
    }
    pieces.push_back(acc);
  }

  ScaledDD prefac = ScaledDD::from(1.0); // lambda^i / i!
  for (int64_t i = 1; i <= ell; ++i) {
    prefac.mul(p.lambda);
    prefac.div(static_cast<double>(i));
    const int64_t q = n - i * (p.k + 1);
    ScaledDD w = ScaledDD::from(1.0); // C(q+i-1, i-1)
    for (int64_t m = 1; m <= i - 1; ++m) {
      w.mul(static_cast<double>(q + m));
      w.div(static_cast<double>(m));
    }
    ScaledDD inner = w;
    for (int64_t j = 0; j < q; ++j) {
      w.mul(p.lambda);
      w.mul(static_cast<double>(q - j));
      w.div(static_cast<double>(j + i) * static_cast<double>(j + 1));
      inner.add(w);
    }
    inner.mul(prefac);
    if (i % 2 == 1) inner.mul(-1.0);
    pieces.push_back(inner);
  }

  int64_t maxe = std::numeric_limits<int64_t>::min();
  for (const ScaledDD& s : pieces) {
    if (s.v.hi != 0.0) maxe = std::max(maxe, s.e2);
  }
  if (maxe == std::numeric_limits<int64_t>::min()) return 0.0;
  DD total{0.0, 0.0};
  for (const ScaledDD& s : pieces) {
    if (s.v.hi == 0.0) continue;
    const int64_t d = s.e2 - maxe;
    if (d < -1060) continue;
    total = dd_add(total, DD{std::ldexp(s.v.hi, static_cast<int>(d)),
                             std::ldexp(s.v.lo, static_cast<int>(d))});
  }
  const double bracket = total.hi + total.lo;
  if (bracket <= 0.0) return 0.0;
  const double unscaled = std::ldexp(bracket, static_cast<int>(maxe)); // p_n * e^{k lambda}
  return std::max(0.0, unscaled * std::exp(-klam));
}

int64_t median(const Params& p) {
  RecurrenceStepper st(p);
  if (st.cdf_at_least_half()) return 0;
  const int64_t limit = support_bound(p) + 8;
  while (st.n() < limit) {
    st.advance();
    if (st.cdf_at_least_half()) return st.n();
  }
  throw std::logic_error("median: cdf never crossed 1/2 within the support bound");
}

double cdf_value_at(const Params& p, int64_t n) {
  if (n < 0) return 0.0;
  RecurrenceStepper st(p);
  while (st.n() < n) st.advance();
  return st.cdf_true();
}

ModeSet mode(const Params& p) {
  const PmfTable t = PmfTable::build(p, support_bound(p));
  const int64_t n_max = t.n_max();
  double best = -std::numeric_limits<double>::infinity();
  int64_t arg = 0;
  for (int64_t n = 0; n <= n_max; ++n) {
    const double lp = t.log_prob(n);
    if (lp > best) {
      best = lp;
      arg = n;
    }
  }
  ModeSet out;
  out.peak_probability = t.prob(arg);
  const double cutoff = best - 1.000001e-12; // log(1 - 1e-12), inclusive side
  for (int64_t n = 0; n <= n_max; ++n) {
    if (t.log_prob(n) >= cutoff) out.modes.push_back(n);
  }
  return out;
}

} // namespace poik
