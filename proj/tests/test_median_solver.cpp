#include <cmath>

#include "doctest.h"
#include "poik/dist_core.hpp"
#include "poik/median_solver.hpp"
#include "poik/numeric.hpp"

using namespace poik;

namespace {

// Independent root of P(Y <= nu) = 1/2 by plain bisection on the cdf.
double bisect_boundary(int64_t k, int64_t nu) {
  double lo = M_LN2 / (2.0 * static_cast<double>(k));
  double hi = 8.0 * static_cast<double>(nu + 1) / static_cast<double>(k * (k + 1) / 2) + 1.0;
  while (cdf_value_at(Params(k, hi), nu) > 0.5) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf_value_at(Params(k, mid), nu) >= 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("median equation gap: exact zero at nu = 0, signs, domain") {
  CHECK(std::abs(median_equation_gap(4, 0, M_LN2 / 4)) < 1e-15);
  // the root for nu = 1 sits below ln2/(k-1), so the gap there is positive
  CHECK(median_equation_gap(10, 1, M_LN2 / 9) > 0.0);
  // vanishes at the independently bisected boundary rate
  const double root = bisect_boundary(3, 2);
  CHECK(std::abs(median_equation_gap(3, 2, root)) < 1e-12);
  CHECK_THROWS_AS(median_equation_gap(3, 4, 0.5), Error); // nu > k
  CHECK_THROWS_AS(median_equation_gap(3, -1, 0.5), Error);
  CHECK_THROWS_AS(median_equation_gap(3, 2, 0.0), Error);
}

TEST_CASE("telescoping identity behind the boundary equation") {
  // 1 + sum_{s<=nu} sum_{j<=s} C(s-1,j-1) l^j/j!  ==  sum_{j<=nu} C(nu,j) l^j/j!
  double worst = 0.0;
  for (int64_t k = 1; k <= 30; ++k) {
    for (int64_t nu = 0; nu <= k; ++nu) {
      for (double lam : {0.01, 0.1, 0.5, 1.0}) {
        NeumaierSum lhs;
        lhs.add(1.0);
        for (int64_t s = 1; s <= nu; ++s) {
          double t = lam;
          lhs.add(t);
          for (int64_t j = 1; j < s; ++j) {
            t *= lam * static_cast<double>(s - j) / (static_cast<double>(j) * (j + 1));
            lhs.add(t);
          }
        }
        NeumaierSum rhs;
        double t = 1.0;
        rhs.add(t);
        for (int64_t j = 0; j < nu; ++j) {
          t *= lam * static_cast<double>(nu - j) /
               (static_cast<double>(j + 1) * static_cast<double>(j + 1));
          rhs.add(t);
        }
        worst = std::max(worst, std::abs(lhs.value() - rhs.value()) / rhs.value());
      }
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("solve_lambda_star: exact nu = 0 solution") {
  const MedianSolveResult r = solve_lambda_star(5, 0);
  CHECK(std::abs(r.lambda_star - M_LN2 / 5) <= 1e-14 * r.lambda_star);
  CHECK(std::abs(r.residual) < 1e-12);
  CHECK(r.mu_star == doctest::Approx(15.0 * M_LN2 / 5).epsilon(1e-14));
  CHECK(!r.used_cdf_bisection);
}

TEST_CASE("solve_lambda_star: nu = k boundary against the published gap fit") {
  const MedianSolveResult r = solve_lambda_star(20, 20);
  // 0.155752*20 + 0.57765625 - 1/320, coefficients are approximate
  CHECK(std::abs(r.mu_star - 20.0 - 3.68957125) < 0.05);
  CHECK(verify_boundary(r));
}

TEST_CASE("solve_lambda_star: nu = 1 against the iterated series") {
  const MedianSolveResult r = solve_lambda_star(10, 1);
  const double series =
      M_LN2 / 9 - M_LN2 * M_LN2 / (2.0 * 9 * 9 * 9) + M_LN2 * M_LN2 * M_LN2 / (3.0 * 9 * 9 * 9 * 9);
  CHECK(std::abs(r.lambda_star - series) < 1e-4);
}

TEST_CASE("solver agrees with direct cdf bisection for nu <= k") {
  for (auto [k, nu] : {std::pair<int64_t, int64_t>{2, 1},
                       {5, 2},
                       {10, 7},
                       {20, 13},
                       {50, 25},
                       {50, 50}}) {
    const MedianSolveResult r = solve_lambda_star(k, nu);
    const double ref = bisect_boundary(k, nu);
    CHECK(std::abs(r.lambda_star - ref) <= 1e-10 * ref);
  }
}

TEST_CASE("boundary rate is strictly increasing in the target median") {
  double prev_lambda = 0.0, prev_mu = 0.0;
  for (int64_t nu = 0; nu <= 12; ++nu) {
    const MedianSolveResult r = solve_lambda_star(12, nu);
    CHECK(r.lambda_star > prev_lambda);
    CHECK(r.mu_star > prev_mu);
    prev_lambda = r.lambda_star;
    prev_mu = r.mu_star;
  }
}

TEST_CASE("generic path above nu = k") {
  const MedianSolveResult r = solve_lambda_star(20, 40);
  CHECK(r.used_cdf_bisection);
  CHECK(std::abs(r.residual) < 1e-12);
  CHECK(verify_boundary(r));
}

TEST_CASE("lambda_star_approx: orders, exactness, domain") {
  CHECK(lambda_star_approx(5, 0, 1) == M_LN2 / 5);
  CHECK(lambda_star_approx(5, 0, 3) == M_LN2 / 5); // exact at nu = 0, all orders
  const double printed = M_LN2 / 99 - M_LN2 * M_LN2 / (2.0 * 99 * 99 * 99) +
                         M_LN2 * M_LN2 * M_LN2 / (3.0 * 99.0 * 99 * 99 * 99);
  CHECK(lambda_star_approx(100, 1, 3) == doctest::Approx(printed).epsilon(1e-15));
  CHECK_THROWS_AS(lambda_star_approx(5, 5, 1), Error);  // nu >= k
  CHECK_THROWS_AS(lambda_star_approx(5, 7, 1), Error);
  CHECK_THROWS_AS(lambda_star_approx(5, 1, 4), Error);  // bad order
  CHECK_THROWS_AS(lambda_star_approx(5, 1, 0), Error);
}

TEST_CASE("order-1 approximation error stays inside the geometric-series bound") {
  // remainder-motivated instance bound at (50, 3)
  const MedianSolveResult r = solve_lambda_star(50, 3);
  CHECK(std::abs(r.lambda_star - lambda_star_approx(50, 3, 1)) <
        2.0 * M_LN2 * 9.0 / (50.0 * 50.0 * 50.0));
  // relative error below 2 nu/k + 2/k for k >= 20
  for (int64_t k : {20, 50, 100, 200}) {
    for (int64_t nu : {0, 1, 2, 5, 10}) {
      const MedianSolveResult s = solve_lambda_star(k, nu);
      const double rel = std::abs(lambda_star_approx(k, nu, 1) - s.lambda_star) / s.lambda_star;
      CHECK(rel < 2.0 * static_cast<double>(nu) / static_cast<double>(k) +
                      2.0 / static_cast<double>(k));
    }
  }
}

TEST_CASE("higher approximation orders tighten toward the root") {
  for (auto [k, nu] : {std::pair<int64_t, int64_t>{30, 2}, {100, 5}}) {
    const double root = solve_lambda_star(k, nu).lambda_star;
    const double e1 = std::abs(lambda_star_approx(k, nu, 1) - root);
    const double e2 = std::abs(lambda_star_approx(k, nu, 2) - root);
    CHECK(e2 < e1);
  }
}

TEST_CASE("verify_boundary accepts solver output and rejects tampering") {
  const MedianSolveResult good = solve_lambda_star(5, 0);
  CHECK(verify_boundary(good));
  const MedianSolveResult mid = solve_lambda_star(20, 7);
  CHECK(verify_boundary(mid));
  MedianSolveResult bad = mid;
  bad.lambda_star *= 1.01;
  CHECK(!verify_boundary(bad));
}

TEST_CASE("solver input validation") {
  CHECK_THROWS_AS(solve_lambda_star(0, 0), Error);
  CHECK_THROWS_AS(solve_lambda_star(5, -1), Error);
}
