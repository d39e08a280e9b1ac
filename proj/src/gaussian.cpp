#include "phaselim/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace phaselim::gaussian {

namespace {

void check_transmittance(double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("transmittance must lie in [0, 1]");
}

double p00_at(double r, double transmittance, double phi_a) {
  return p00(chain_output(r, transmittance, phi_a));
}

}  // namespace

Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = omega(2, 3) = 1.0;
  omega(1, 0) = omega(3, 2) = -1.0;
  return omega;
}

bool is_symplectic(const Eigen::Matrix4d& s, double tol) {
  const Eigen::Matrix4d omega = symplectic_form();
  return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff() <= tol;
}

Symplectic symplectic_bs(double transmittance) {
  check_transmittance(transmittance);
  const double ct = std::sqrt(transmittance);
  const double st = std::sqrt(1.0 - transmittance);
  Symplectic out;
  out.s << ct, 0, st, 0,
           0, ct, 0, st,
           -st, 0, ct, 0,
           0, -st, 0, ct;
  return out;
}

Symplectic symplectic_ps(double phi_a) {
  const double c = std::cos(phi_a);
  const double s = std::sin(phi_a);
  Symplectic out;
  out.s << c, s, 0, 0,
           -s, c, 0, 0,
           0, 0, 1, 0,
           0, 0, 0, 1;
  return out;
}

Symplectic symplectic_sq(double r) {
  if (!std::isfinite(r)) throw std::invalid_argument("squeezing parameter must be finite");
  Symplectic out;
  out.s = Eigen::Vector4d(std::exp(-r), std::exp(r), 1.0, 1.0).asDiagonal();
  return out;
}

GaussianState chain_output(double r, double transmittance, double phi_a) {
  const Eigen::Matrix4d bs = symplectic_bs(transmittance).s;
  const Eigen::Matrix4d total = symplectic_sq(-r).s * bs.transpose() *
                                symplectic_ps(phi_a).s * bs * symplectic_sq(r).s;
  GaussianState out;
  out.cov = total * total.transpose();
  return out;
}

double p00(const GaussianState& state) {
  const double det = (state.cov + Eigen::Matrix4d::Identity()).determinant();
  if (!(det > 0.0)) throw std::invalid_argument("covariance matrix is not physical");
  return 4.0 / std::sqrt(det);
}

CfiPoint cfi_two_outcome_detail(double r, double transmittance, double phi_a) {
  const double p = p00_at(r, transmittance, phi_a);
  if (1.0 - p < 1e-14) {
    return {cfi_limit(2.0 * std::pow(std::sinh(r), 2), transmittance), true};
  }
  const double h = 1e-5;
  const auto central = [&](double step) {
    return (p00_at(r, transmittance, phi_a + step) -
            p00_at(r, transmittance, phi_a - step)) /
           (2.0 * step);
  };
  const double deriv = (4.0 * central(h / 2.0) - central(h)) / 3.0;
  return {deriv * deriv / (p * (1.0 - p)), false};
}

double cfi_two_outcome(double r, double transmittance, double phi_a) {
  return cfi_two_outcome_detail(r, transmittance, phi_a).value;
}

double cfi_limit(double nbar_tot, double transmittance) {
  if (!(nbar_tot >= 0.0)) throw std::invalid_argument("nbar_tot must be >= 0");
  check_transmittance(transmittance);
  return 2.0 * nbar_tot * transmittance *
         (1.0 + transmittance + nbar_tot * transmittance);
}

}  // namespace phaselim::gaussian
