#pragma once

#include <Eigen/Dense>

#include "phaselim/errors.hpp"

/// Covariance-matrix model of the squeezer / interferometer / anti-squeezer
/// detection scheme, the double-dark-count probability, and its two-outcome
/// classical Fisher information.
///
/// Quadrature ordering is (x_A, p_A, x_B, p_B) with vacuum covariance = identity;
/// the symplectic matrices match the Fock-engine conventions exactly (see fock.hpp).
namespace phaselim::gaussian {

struct GaussianState {
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
};

struct Symplectic {
  Eigen::Matrix4d s = Eigen::Matrix4d::Identity();
};

/// The symplectic form Omega = diag([[0, 1], [-1, 0]], [[0, 1], [-1, 0]]).
Eigen::Matrix4d symplectic_form();

/// s Omega s^T = Omega within tol.
bool is_symplectic(const Eigen::Matrix4d& s, double tol = 1e-9);

/// Beam splitter: block-scalar mixing with rows (sqrt(T), sqrt(1-T)) and
/// (-sqrt(1-T), sqrt(T)) on the (A, B) quadrature pairs.
Symplectic symplectic_bs(double transmittance);

/// Phase shift on arm A: rotation by phi_a in the (x_A, p_A) plane,
/// [[cos, sin], [-sin, cos]].
Symplectic symplectic_ps(double phi_a);

/// Single-mode squeeze on arm A: diag(e^{-r}, e^{r}, 1, 1).
Symplectic symplectic_sq(double r);

/// gamma_out of the full chain on vacuum input:
/// S = S_SQ(-r) S_BS^T S_PS(phi_a) S_BS S_SQ(r), gamma_out = S S^T (mean stays 0).
GaussianState chain_output(double r, double transmittance, double phi_a);

/// Probability that both on/off detectors stay dark: 4 / sqrt(det(gamma + I)).
double p00(const GaussianState& state);

/// Two-outcome classical Fisher information (dP/dphi)^2 / (P(1-P)) at the working
/// point, with the derivative from a Richardson-extrapolated central difference
/// (h = 1e-5, error O(h^4)). When 1 - P00 < 1e-14 the quotient is 0/0 and the
/// analytic small-phase limit is returned instead, flagged via limit_path.
struct CfiPoint {
  double value = 0.0;
  bool limit_path = false;
};
CfiPoint cfi_two_outcome_detail(double r, double transmittance, double phi_a);
double cfi_two_outcome(double r, double transmittance, double phi_a);

/// Small-phase closed form 2 nbar_tot T (1 + T + nbar_tot T), where nbar_tot is the
/// total mean photon resource of probe plus measurement squeezer (= 2 sinh^2 r).
double cfi_limit(double nbar_tot, double transmittance);

}  // namespace phaselim::gaussian
