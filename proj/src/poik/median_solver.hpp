#pragma once

#include <cstdint>

#include "dist_core.hpp"

namespace poik {

// Root-solve output for the boundary rate lambda_{nu,*} at which
// P(Y <= nu) = 1/2. mu_star = kappa * lambda_star is the mean there.
struct MedianSolveResult {
  int64_t k = 0;
  int64_t nu = 0;
  double lambda_star = 0.0;
  double mu_star = 0.0;
  double residual = 0.0; // value of the solved equation at lambda_star
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool used_cdf_bisection = false; // generic path, taken for nu > k
};

// Log-form residual of the boundary equation for nu in [0, k]:
//   g(lambda) = k*lambda - ln 2 - ln( sum_{j=0}^{nu} C(nu,j) lambda^j / j! ).
// g vanishes exactly at lambda_{nu,*}. The sum is built from the term ratio
// lambda*(nu-j)/(j+1)^2, so no factorial or binomial is ever materialized.
// DomainError for nu > k: the closed equation is only established there.
double median_equation_gap(int64_t k, int64_t nu, double lambda);

// Boundary rate for any target median nu >= 0. Uses the closed equation for
// nu <= k; for nu > k it bisects P(Y <= nu) - 1/2 directly on the cdf.
// The initial bracket [ln2/k, max(2 ln2 / max(1, k-nu), 4(nu+1)/kappa)] is
// widened geometrically until the residual changes sign (BracketFailure
// after 60 widenings), then bisected to 1e-3 and Brent-polished.
MedianSolveResult solve_lambda_star(int64_t k, int64_t nu);

// Iterative closed-form approximations of lambda_{nu,*} for nu < k.
//   order 1:  ln2/(k - nu)
//   orders 2-3 add the correction terms obtained by substituting the order-1
//   value into the lambda^2 / lambda^3 coefficients of the rearranged log
//   equation; at nu = 1 this reproduces
//   ln2/(k-1) - (ln2)^2/(2(k-1)^3) + (ln2)^3/(3(k-1)^4).
// DomainError for nu >= k, where the iteration has no small parameter.
double lambda_star_approx(int64_t k, int64_t nu, int order);

// Cross-check against dist_core: the cdf at nu equals 1/2 within 1e-9 at
// lambda_star, and the median flips from nu to nu+1 across
// lambda_star +- 1e-9 * max(1, lambda_star).
bool verify_boundary(const MedianSolveResult& r);

} // namespace poik
