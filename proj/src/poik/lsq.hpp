#pragma once

#include <cstddef>
#include <vector>

namespace poik {

// Dense least squares min ||X b - y||_2 via Householder QR.
// `columns` holds the design matrix column-by-column; all columns must have
// the same length as y. Throws SingularSystem when R has a numerically zero
// diagonal (rank-deficient basis).
std::vector<double> lsq_solve(std::vector<std::vector<double>> columns,
                              std::vector<double> y);

} // namespace poik
