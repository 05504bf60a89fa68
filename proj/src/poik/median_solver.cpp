#include "median_solver.hpp"

#include <cmath>
#include <functional>

#include "error.hpp"
#include "numeric.hpp"

namespace poik {

double median_equation_gap(int64_t k, int64_t nu, double lambda) {
  if (k < 1) raise(errc::invalid_argument, "median_equation_gap: k must be >= 1");
  if (nu < 0) raise(errc::invalid_argument, "median_equation_gap: nu must be >= 0");
  if (nu > k) {
    raise(errc::domain_error,
          "median_equation_gap: the closed equation is established only for nu <= k");
  }
  if (!std::isfinite(lambda) || !(lambda > 0.0)) {
    raise(errc::invalid_argument, "median_equation_gap: lambda must be positive");
  }
  // sum_{j=0}^{nu} C(nu,j) lambda^j / j!; consecutive terms differ by
  // lambda*(nu-j)/(j+1)^2. The running term is renormalized by an exact power
  // of two if it threatens the double range (possible far from the root).
  NeumaierSum sum;
  double term = 1.0;
  double log_offset = 0.0;
  sum.add(term);
  for (int64_t j = 0; j < nu; ++j) {
    const double ratio =
        lambda * static_cast<double>(nu - j) / (static_cast<double>(j + 1) * (j + 1));
    term *= ratio;
    sum.add(term);
    if (term > 1e280) {
      const double f = 0x1p-930;
      term *= f;
      sum.scale(f);
      log_offset += 930 * M_LN2;
    } else if (ratio < 0.5 && term < sum.sum * 1e-18) {
      break; // remaining tail is below 1e-18 of the sum
    }
  }
  return static_cast<double>(k) * lambda - M_LN2 - (std::log(sum.value()) + log_offset);
}

MedianSolveResult solve_lambda_star(int64_t k, int64_t nu) {
  if (k < 1) raise(errc::invalid_argument, "solve_lambda_star: k must be >= 1");
  if (nu < 0) raise(errc::invalid_argument, "solve_lambda_star: nu must be >= 0");
  const double kappa = 0.5 * static_cast<double>(k) * static_cast<double>(k + 1);
  const bool generic = nu > k;

  // F is increasing in lambda with F(lambda_star) = 0 on either path.
  const std::function<double(double)> F = generic
      ? std::function<double(double)>(
            [k, nu](double lam) { return 0.5 - cdf_value_at(Params(k, lam), nu); })
      : std::function<double(double)>(
            [k, nu](double lam) { return median_equation_gap(k, nu, lam); });

  double lo = M_LN2 / static_cast<double>(k);
  double hi = std::max(2.0 * M_LN2 / static_cast<double>(std::max<int64_t>(1, k - nu)),
                       4.0 * static_cast<double>(nu + 1) / kappa);
  if (hi <= lo) hi = 2.0 * lo;
  double flo = F(lo);
  double fhi = F(hi);
  int iters = 2;
  int expansions = 0;
  while (flo > 0.0 && expansions < 60) {
    lo *= 0.5;
    flo = F(lo);
    ++iters;
    ++expansions;
  }
  while (fhi < 0.0 && expansions < 60) {
    hi *= 2.0;
    fhi = F(hi);
    ++iters;
    ++expansions;
  }
  if (flo > 0.0 || fhi < 0.0) {
    raise(errc::bracket_failure, "solve_lambda_star: no sign change within 60 widenings for k=" +
                                     std::to_string(k) + " nu=" + std::to_string(nu));
  }

  MedianSolveResult out;
  out.k = k;
  out.nu = nu;
  out.used_cdf_bisection = generic;
  out.bracket_lo = lo;
  out.bracket_hi = hi;

  // Bisect to ~1e-3 relative width, then let Brent finish.
  while (hi - lo > 1e-3 * hi && iters < 200 && flo != 0.0 && fhi != 0.0) {
    const double mid = 0.5 * (lo + hi);
    const double fm = F(mid);
    ++iters;
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }

  double root, froot;
  if (flo == 0.0) {
    root = lo;
    froot = 0.0;
  } else if (fhi == 0.0) {
    root = hi;
    froot = 0.0;
  } else {
    const RootResult rr =
        brent(F, lo, hi, flo, fhi, /*ftol=*/0.0,
              /*xtol_rel=*/8.0 * std::numeric_limits<double>::epsilon(), /*max_iter=*/200);
    root = rr.x;
    froot = rr.fx;
    iters += rr.iterations;
  }

  out.lambda_star = root;
  out.mu_star = static_cast<double>(Params(k, 1.0).kappa()) * root;
  out.residual = froot;
  out.iterations = iters;
  return out;
}

double lambda_star_approx(int64_t k, int64_t nu, int order) {
  if (k < 1) raise(errc::invalid_argument, "lambda_star_approx: k must be >= 1");
  if (nu < 0) raise(errc::invalid_argument, "lambda_star_approx: nu must be >= 0");
  if (order < 1 || order > 3) {
    raise(errc::invalid_argument, "lambda_star_approx: order must be 1, 2 or 3");
  }
  if (nu >= k) {
    raise(errc::domain_error,
          "lambda_star_approx: iteration in ln2/(k-nu) has no small parameter at nu >= k");
  }
  const double L = M_LN2 / static_cast<double>(k - nu);
  if (order == 1) return L;
  // ln sum_{j<=nu} C(nu,j) lambda^j/j! = nu*lambda + c2*lambda^2 + c3*lambda^3 + ...
  const double v = static_cast<double>(nu);
  const double s2 = v * (v - 1.0) / 4.0;           // C(nu,2)/2!
  const double s3 = v * (v - 1.0) * (v - 2.0) / 36.0; // C(nu,3)/3!
  const double c2 = s2 - 0.5 * v * v;
  const double c3 = s3 - v * s2 + v * v * v / 3.0;
  const double km = static_cast<double>(k - nu);
  double out = L + c2 * L * L / km;
  if (order == 3) out += c3 * L * L * L / km;
  return out;
}

bool verify_boundary(const MedianSolveResult& r) {
  if (r.k < 1 || r.nu < 0 || !(r.lambda_star > 0.0)) return false;
  const double c = cdf_value_at(Params(r.k, r.lambda_star), r.nu);
  if (std::abs(c - 0.5) > 1e-9) return false;
  const double delta = 1e-9 * std::max(1.0, r.lambda_star);
  if (r.lambda_star - delta <= 0.0) return false;
  const int64_t below = median(Params(r.k, r.lambda_star - delta));
  const int64_t above = median(Params(r.k, r.lambda_star + delta));
  return below == r.nu && above == r.nu + 1;
}

} // namespace poik
