#include "fbic/effective.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fbic {

namespace {

// Miller backward recurrence for x > 0, normalized by J0 + 2 sum J_2k = 1.
Eigen::VectorXd miller_recurrence(int max_order, double x) {
  // Start high enough that J_start(x) is far below double precision.
  int start = std::max(max_order, static_cast<int>(std::ceil(x))) + 60;
  start += start % 2;

  Eigen::VectorXd work = Eigen::VectorXd::Zero(start + 1);
  double next = 0.0;
  double current = 1e-300;
  double norm = 0.0;
  for (int m = start; m >= 0; --m) {
    work[m] = current;
    if (m % 2 == 0) {
      norm += (m == 0 ? 1.0 : 2.0) * current;
    }
    if (m == 0) {
      break;
    }
    const double previous = 2.0 * m / x * current - next;
    next = current;
    current = previous;
    if (std::abs(current) > 1e250) {
      work *= 1e-250;
      next *= 1e-250;
      current *= 1e-250;
      norm *= 1e-250;
    }
  }
  return work.head(max_order + 1) / norm;
}

} // namespace

Eigen::VectorXd bessel_j_table(int max_order, double x) {
  if (max_order < 0 || max_order > 2 * kBesselMaxOrder) {
    throw std::invalid_argument("bessel_j_table: order out of range");
  }
  if (!std::isfinite(x) || std::abs(x) > kBesselMaxArgument) {
    throw std::invalid_argument("bessel_j_table: argument out of range");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(max_order + 1);
  const double ax = std::abs(x);
  if (ax == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (ax < 1e-6) {
    // Two-term series; relative error below (x/2)^4.
    const double half = 0.5 * ax;
    double term = 1.0;
    for (int m = 0; m <= max_order; ++m) {
      if (m > 0) {
        term *= half / m;
      }
      out[m] = term * (1.0 - half * half / (m + 1));
    }
  } else {
    out = miller_recurrence(max_order, ax);
  }
  if (x < 0.0) {
    for (int m = 1; m <= max_order; m += 2) {
      out[m] = -out[m];
    }
  }
  return out;
}

double bessel_j(int order, double x) {
  const int n = std::abs(order);
  if (n > kBesselMaxOrder) {
    throw std::invalid_argument("bessel_j: |order| > 200");
  }
  const double value = bessel_j_table(n, x)[n];
  return (order < 0 && n % 2 == 1) ? -value : value;
}

double q_factor(double gamma, int truncation) {
  if (truncation < 1) {
    throw std::invalid_argument("q_factor: truncation must be positive");
  }
  const Eigen::VectorXd table = bessel_j_table(2 * truncation, gamma);
  auto j = [&](int order) {
    const int n = std::abs(order);
    return (order < 0 && n % 2 == 1) ? -table[n] : table[n];
  };
  double sum = 0.0;
  for (int l = -truncation; l <= truncation; ++l) {
    if (l == 0) {
      continue;
    }
    for (int m = -truncation; m <= truncation; ++m) {
      if (m == 0) {
        continue;
      }
      sum += j(l) * j(m) * j(m - l) / (static_cast<double>(l) * m);
    }
  }
  return -sum;
}

EffectiveLattice effective_hoppings(double gamma, double kappa_over_omega,
                                    double rho_over_kappa, int truncation) {
  const double kappa = kappa_over_omega;
  const double rho = rho_over_kappa * kappa;
  const double j0 = bessel_j(0, gamma);
  const double q = q_factor(gamma, truncation);

  EffectiveLattice out;
  out.gamma = gamma;
  out.q_value = q;
  out.kappa_e = kappa * j0;
  out.alpha = kappa * j0 - kappa * q * (rho * rho - kappa * kappa);
  out.beta = rho * j0 + rho * q * (rho * rho - kappa * kappa);
  out.outside_validity = std::abs(j0) > kEffectiveValidity;
  return out;
}

namespace {

double delta_term(double left, double self, double right, double j0, double q) {
  return self * j0 -
         q * (self * right * right - 2.0 * self * self * self + self * left * left);
}

} // namespace

Eigen::VectorXd effective_delta(const Eigen::VectorXd& profile, double gamma,
                                int truncation) {
  if (profile.size() < 3) {
    throw std::invalid_argument("effective_delta: profile needs >= 3 bonds");
  }
  const double j0 = bessel_j(0, gamma);
  const double q = q_factor(gamma, truncation);
  Eigen::VectorXd out(profile.size() - 2);
  for (Eigen::Index b = 1; b + 1 < profile.size(); ++b) {
    out[b - 1] = delta_term(profile[b - 1], profile[b], profile[b + 1], j0, q);
  }
  return out;
}

Eigen::VectorXd effective_delta(const LatticeSpec& lattice, double gamma,
                                int truncation) {
  const Eigen::VectorXd& k = lattice.hoppings();
  const Eigen::Index n = k.size();
  const double j0 = bessel_j(0, gamma);
  const double q = q_factor(gamma, truncation);
  Eigen::VectorXd out(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    out[b] = delta_term(k[(b + n - 1) % n], k[b], k[(b + 1) % n], j0, q);
  }
  return out;
}

namespace {

template <typename F>
std::optional<double> bisect(F&& f, double lo, double hi, double tol,
                             const char* name, std::ostringstream& log) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) {
    return lo;
  }
  if (f_hi == 0.0) {
    return hi;
  }
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    log << name << ": no sign change on [" << lo << ", " << hi << "] ("
        << f_lo << ", " << f_hi << "); ";
    return std::nullopt;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      return mid;
    }
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace

SdtRoots find_sdt_roots(double kappa_over_omega, double rho_over_kappa,
                        std::pair<double, double> bracket, int truncation) {
  if (!(rho_over_kappa > 0.0) || !(rho_over_kappa < 1.0)) {
    throw std::invalid_argument("find_sdt_roots: requires 0 < rho < kappa");
  }
  if (!(bracket.first < bracket.second)) {
    throw std::invalid_argument("find_sdt_roots: empty bracket");
  }
  constexpr double tol = 1e-9;
  std::ostringstream log;
  auto alpha = [&](double g) {
    return effective_hoppings(g, kappa_over_omega, rho_over_kappa, truncation).alpha;
  };
  auto beta = [&](double g) {
    return effective_hoppings(g, kappa_over_omega, rho_over_kappa, truncation).beta;
  };
  SdtRoots roots;
  roots.gamma1 = bisect(alpha, bracket.first, bracket.second, tol, "alpha", log);
  roots.gamma2 = bisect(beta, bracket.first, bracket.second, tol, "beta", log);
  roots.diagnostics = log.str();
  return roots;
}

std::array<TrimerMode, 3> trimer_modes(double beta) {
  const double s = std::sqrt(0.5);
  return {{
      {-std::sqrt(2.0) * beta, Eigen::Vector3d(0.5, -s, 0.5)},
      {0.0, Eigen::Vector3d(s, 0.0, -s)},
      {std::sqrt(2.0) * beta, Eigen::Vector3d(0.5, s, 0.5)},
  }};
}

} // namespace fbic
