#pragma once

#include <Eigen/Dense>

namespace fbic {

/// Sum over columns of sum_n |c_n|^4.
double localization_measure(const Eigen::MatrixXcd& block);

/// Unitary rotation of an orthonormal set of columns that maximizes
/// localization_measure, by Jacobi sweeps over column pairs. Each pair
/// rotation is optimal in closed form: the gain is a quadratic form on the
/// unit sphere in R^3. Stops when a sweep improves the measure by less than
/// `tolerance` (relative).
void maximize_localization(Eigen::MatrixXcd& block, double tolerance = 1e-12,
                           int max_sweeps = 200);

} // namespace fbic
