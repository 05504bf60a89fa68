#include <cmath>

#include "doctest.h"
#include "poik/dist_core.hpp"
#include "poik/numeric.hpp"
#include "poik/oracle.hpp"

using namespace poik;

namespace {

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

} // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(Params(0, 1.0), Error);
  CHECK_THROWS_AS(Params(-3, 1.0), Error);
  CHECK_THROWS_AS(Params(2, 0.0), Error); // point mass at 0 is rejected
  CHECK_THROWS_AS(Params(2, -0.5), Error);
  CHECK_THROWS_AS(Params(2, std::nan("")), Error);
  CHECK_THROWS_AS(Params(2, std::numeric_limits<double>::infinity()), Error);
  CHECK(Params(3, 0.5).kappa() == 6);
  CHECK(Params(1000, 1.0).kappa() == 500500);
}

TEST_CASE("mean and variance closed forms") {
  CHECK(mean(Params(1, 3.0)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(mean(Params(20, 0.1)) == doctest::Approx(21.0).epsilon(1e-15));
  CHECK(mean(Params(3, 0.5)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(variance(Params(1, 3.0)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(variance(Params(2, 1.0)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(variance(Params(4, 0.5)) == doctest::Approx(15.0).epsilon(1e-15));
}

TEST_CASE("support bound formula and actual tail mass") {
  CHECK(support_bound(Params(1, 1.0)) == 45); // ceil(1 + 12 + 32)
  // ceil(21 + 12*sqrt(287) + 32) with variance 287 from the closed form
  CHECK(support_bound(Params(20, 0.1)) == 257);
  // tail mass beyond the bound, via the series oracle
  const Params p(5, 2.0);
  const int64_t bound = support_bound(p);
  const PmfTable conv = oracle::pmf_by_convolution(p, bound + 400);
  CHECK(1.0 - conv.cdf(bound) < 1e-12);
}

TEST_CASE("combinatorial pmf: branch values") {
  CHECK(pmf_combinatorial(Params(3, 0.2), 0) ==
        doctest::Approx(std::exp(-0.6)).epsilon(1e-15));
  // k = 1 reduces to the standard Poisson
  CHECK(pmf_combinatorial(Params(1, 2.0), 3) ==
        doctest::Approx(std::exp(-2.0) * 8.0 / 6.0).epsilon(1e-14));
  // alternating branch against the series oracle (frozen value from the oracle)
  const double p5 = pmf_combinatorial(Params(3, 0.5), 5);
  CHECK(p5 == doctest::Approx(0.086056189369746).epsilon(1e-12));
  CHECK(rel_close(p5, oracle::pmf_by_convolution(Params(3, 0.5), 5).prob(5), 1e-12));
  CHECK_THROWS_AS(pmf_combinatorial(Params(3, 0.5), -1), Error);
}

TEST_CASE("combinatorial pmf: guard at k*lambda > 700") {
  try {
    pmf_combinatorial(Params(100, 8.0), 3);
    FAIL("expected guard");
  } catch (const Error& e) {
    CHECK(e.code() == errc::guard_exceeded);
  }
  // just inside the guard still evaluates
  CHECK(pmf_combinatorial(Params(100, 6.9), 0) ==
        doctest::Approx(std::exp(-690.0)).epsilon(1e-12));
}

TEST_CASE("pmf table reduces to the standard Poisson at k = 1") {
  const PmfTable t = pmf_table(Params(1, 1.0), 10);
  double f = std::exp(-1.0);
  for (int64_t n = 0; n <= 10; ++n) {
    CHECK(rel_close(t.prob(n), f, 1e-12));
    f /= static_cast<double>(n + 1);
  }
}

TEST_CASE("pmf table matches the combinatorial branches entrywise") {
  const Params p(5, 0.3);
  const PmfTable t = pmf_table(p, 30);
  for (int64_t n = 0; n <= 30; ++n) {
    CHECK(rel_close(t.prob(n), pmf_combinatorial(p, n), 1e-10));
  }
}

TEST_CASE("pmf table survives far beyond exp underflow") {
  // e^-1000 underflows a naive prefactor; mass must still sum to 1
  const Params p(1000, 1.0);
  const PmfTable t = pmf_table(p, 4 * p.kappa());
  CHECK(std::abs(t.cdf(t.n_max()) - 1.0) < 1e-10);
  CHECK(t.log_prob(0) == -(1000.0 * 1.0));
}

TEST_CASE("pmf table at k*lambda = 1e5") {
  const Params p(10, 1e4);
  const PmfTable t = pmf_table(p, support_bound(p));
  CHECK(std::abs(t.cdf(t.n_max()) - 1.0) < 1e-10);
  CHECK(t.log_prob(0) == doctest::Approx(-1e5).epsilon(1e-12));
  CHECK(t.prob(0) == 0.0); // true value below double range
}

TEST_CASE("p0 anchoring is exact in log space") {
  const PmfTable t = pmf_table(Params(3, 0.7), 5);
  CHECK(t.log_prob(0) == -(3.0 * 0.7));
  CHECK(rel_close(t.prob(0), std::exp(-2.1), 1e-12));
}

TEST_CASE("table bounds and caps") {
  const PmfTable t = pmf_table(Params(2, 1.0), 5);
  CHECK(t.n_max() == 5);
  CHECK_THROWS_AS(t.prob(6), Error);
  CHECK_THROWS_AS(t.cdf(-1), Error);
  CHECK_THROWS_AS(cdf(t, 6), Error);
  try {
    pmf_table(Params(2, 1.0), 20'000'000); // above the default cap
    FAIL("expected allocation bound");
  } catch (const Error& e) {
    CHECK(e.code() == errc::allocation_bound);
  }
  // a raised cap admits the same request
  CHECK(pmf_table(Params(2, 1.0), 1 << 20, 1 << 21).n_max() == (1 << 20));
  // n_max = 0 still carries p_0
  CHECK(pmf_table(Params(3, 0.2), 0).prob(0) ==
        doctest::Approx(std::exp(-0.6)).epsilon(1e-14));
}

TEST_CASE("cdf against oracle partial sums and the forced half point") {
  const Params p(3, 0.4);
  const PmfTable t = pmf_table(p, 50);
  const PmfTable conv = oracle::pmf_by_convolution(p, 50);
  CHECK(rel_close(t.cdf(2), conv.cdf(2), 1e-12));
  // p_0 = e^{-k lambda} = 1/2 exactly at lambda = ln2/k
  const PmfTable half = pmf_table(Params(2, M_LN2 / 2), 10);
  CHECK(half.cdf(0) == 0.5);
  // total mass
  const PmfTable full = pmf_table(p, support_bound(p));
  CHECK(std::abs(full.cdf(full.n_max()) - 1.0) < 1e-10);
}

TEST_CASE("median at the zero boundary, both sides, k up to 100") {
  for (int64_t k = 1; k <= 100; ++k) {
    CHECK(median(Params(k, M_LN2 / static_cast<double>(k))) == 0);
    CHECK(median(Params(k, M_LN2 / static_cast<double>(k) + 1e-9)) == 1);
  }
}

TEST_CASE("median spot values") {
  CHECK(median(Params(7, M_LN2 / 7)) == 0);
  CHECK(median(Params(7, M_LN2 / 7 + 1e-6)) == 1);
  // pinned mean n = 2*kappa -> median n - floor((k+4)/8)
  CHECK(median(Params(5, 2.0)) == 29);
  CHECK(median(Params(20, 1.0)) == 207);
}

TEST_CASE("median increases in unit steps along lambda") {
  for (int64_t k : {1, 3, 7}) {
    int64_t prev = median(Params(k, 1e-3));
    for (int step = 2; step <= 3000; ++step) {
      const int64_t m = median(Params(k, step * 1e-3));
      CHECK(m >= prev);
      CHECK(m - prev <= 1);
      prev = m;
    }
  }
}

TEST_CASE("mode: uniqueness, exact integer ties, conjecture instance") {
  const ModeSet single = mode(Params(1, 2.5));
  CHECK(single.modes == std::vector<int64_t>{2});
  const ModeSet pair = mode(Params(1, 3.0));
  CHECK(pair.modes == std::vector<int64_t>{2, 3}); // both lambda-1 and lambda
  const ModeSet m52 = mode(Params(5, 2.0));
  CHECK(std::find(m52.modes.begin(), m52.modes.end(), 28) != m52.modes.end());
  // every reported mode attains the global maximum within 1e-12
  const PmfTable t = pmf_table(Params(5, 2.0), support_bound(Params(5, 2.0)));
  for (int64_t m : m52.modes) {
    CHECK(t.prob(m) >= m52.peak_probability * (1.0 - 1e-12));
  }
  CHECK(m52.peak_probability == doctest::Approx(t.prob(28)).epsilon(1e-12));
}

TEST_CASE("streamed cdf equals table cdf") {
  const Params p(4, 0.7);
  const PmfTable t = pmf_table(p, 40);
  for (int64_t n : {0, 1, 5, 17, 40}) {
    CHECK(rel_close(cdf_value_at(p, n), t.cdf(n), 1e-13));
  }
  CHECK(cdf_value_at(p, -1) == 0.0);
}

TEST_CASE("moment recovery from the table on a desk pair") {
  const Params p(10, 0.5);
  const PmfTable t = pmf_table(p, support_bound(p));
  NeumaierSum m1, m2;
  for (int64_t n = 0; n <= t.n_max(); ++n) {
    const double pr = t.prob(n);
    m1.add(static_cast<double>(n) * pr);
    m2.add(static_cast<double>(n) * static_cast<double>(n) * pr);
  }
  const double mv = m1.value();
  CHECK(rel_close(mv, mean(p), 1e-10));
  CHECK(rel_close(m2.value() - mv * mv, variance(p), 1e-8));
}
