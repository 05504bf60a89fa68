#include "lsq.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"

namespace poik {

std::vector<double> lsq_solve(std::vector<std::vector<double>> columns, std::vector<double> y) {
  const size_t ncols = columns.size();
  const size_t nrows = y.size();
  if (ncols == 0 || nrows < ncols) {
    raise(errc::singular_system, "least squares: fewer rows than basis functions");
  }
  for (const auto& c : columns) {
    if (c.size() != nrows) raise(errc::invalid_argument, "least squares: ragged design matrix");
  }

  // Householder triangularization applied to the columns and to y in lockstep.
  std::vector<double> diag(ncols, 0.0);
  double max_diag = 0.0;
  for (size_t j = 0; j < ncols; ++j) {
    auto& cj = columns[j];
    double norm = 0.0;
    for (size_t i = j; i < nrows; ++i) norm += cj[i] * cj[i];
    norm = std::sqrt(norm);
    if (cj[j] > 0) norm = -norm;
    diag[j] = norm;
    max_diag = std::max(max_diag, std::abs(norm));
    if (norm == 0.0) continue; // zero column; rank check below rejects it
    // v = x - norm*e_j, stored in place of column j below the diagonal
    cj[j] -= norm;
    double vnorm2 = 0.0;
    for (size_t i = j; i < nrows; ++i) vnorm2 += cj[i] * cj[i];
    if (vnorm2 == 0.0) continue;
    const auto reflect = [&](std::vector<double>& target) {
      double dot = 0.0;
      for (size_t i = j; i < nrows; ++i) dot += cj[i] * target[i];
      const double f = 2.0 * dot / vnorm2;
      for (size_t i = j; i < nrows; ++i) target[i] -= f * cj[i];
    };
    for (size_t jj = j + 1; jj < ncols; ++jj) reflect(columns[jj]);
    reflect(y);
  }

  const double tol = std::max(nrows, ncols) * std::numeric_limits<double>::epsilon() * max_diag;
  for (size_t j = 0; j < ncols; ++j) {
    if (std::abs(diag[j]) <= tol) {
      raise(errc::singular_system, "least squares: rank-deficient design matrix");
    }
  }

  // Back substitution on R (upper triangle lives in columns[jj][j], jj > j).
  std::vector<double> beta(ncols, 0.0);
  for (size_t jr = ncols; jr-- > 0;) {
    double rhs = y[jr];
    for (size_t jj = jr + 1; jj < ncols; ++jj) rhs -= columns[jj][jr] * beta[jj];
    beta[jr] = rhs / diag[jr];
  }
  return beta;
}

} // namespace poik
