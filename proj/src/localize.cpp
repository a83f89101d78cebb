#include "fbic/localize.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace fbic {

double localization_measure(const Eigen::MatrixXcd& block) {
  return block.cwiseAbs2().cwiseAbs2().sum();
}

namespace {

// Rotation a' = c a + s e^{i phi} b, b' = -s e^{-i phi} a + c b.
// With x = cos 2t, y = sin 2t the pair measure is
//   const + sum_n (x d_n + y Re(e^{i phi} w_n))^2,  d = (|a|^2 - |b|^2)/2,
// w = conj(a) b, i.e. z^T G z with z = (x, y cos phi, -y sin phi) on the
// unit sphere and G = sum g g^T, g = (d, Re w, Im w).
double rotate_pair(Eigen::Ref<Eigen::VectorXcd> a, Eigen::Ref<Eigen::VectorXcd> b) {
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  for (Eigen::Index n = 0; n < a.size(); ++n) {
    const std::complex<double> w = std::conj(a[n]) * b[n];
    const Eigen::Vector3d g(0.5 * (std::norm(a[n]) - std::norm(b[n])), w.real(), w.imag());
    gram.noalias() += g * g.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(gram);
  Eigen::Vector3d z = solver.eigenvectors().col(2);
  if (z[0] < 0.0) {
    z = -z;
  }
  const double gain = solver.eigenvalues()[2] - gram(0, 0);
  if (!(gain > 0.0)) {
    return 0.0;
  }
  const double y = std::hypot(z[1], z[2]);
  const double theta = 0.5 * std::atan2(y, z[0]);
  const double phi = std::atan2(-z[2], z[1]);
  const double c = std::cos(theta);
  const std::complex<double> s = std::sin(theta) * std::polar(1.0, phi);
  const Eigen::VectorXcd a_old = a;
  a = c * a_old + s * b;
  b = -std::conj(s) * a_old + c * b;
  return 2.0 * gain;
}

} // namespace

void maximize_localization(Eigen::MatrixXcd& block, double tolerance, int max_sweeps) {
  const Eigen::Index m = block.cols();
  if (m < 2) {
    return;
  }
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double before = localization_measure(block);
    double improvement = 0.0;
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        improvement += rotate_pair(block.col(i), block.col(j));
      }
    }
    if (improvement <= tolerance * before) {
      break;
    }
  }
}

} // namespace fbic
