#pragma once

#include <Eigen/Dense>

#include "phaselim/fock.hpp"
#include "phaselim/probe.hpp"

/// Quantum Fisher information for the interferometer phase models: pure-state QFI,
/// the 2x2 information matrix over (phi_d, phi_s) with its tight two-parameter
/// Cramer-Rao bound, the mixed-state spectral formula, and the phase-averaged limit.
///
/// All quantities are evaluated at zero phase; for unitary phase families the QFI is
/// phase-independent, so this is without loss of generality (see docs).
namespace phaselim::fisher {

/// Symmetric 2x2 Fisher information matrix. For the two-arm model the basis is
/// (phi_d, phi_s); the generic two-generator routine maps its first generator to
/// the dd slot and its second to ss.
struct Qfim {
  double f_dd = 0.0;
  double f_ss = 0.0;
  double f_sd = 0.0;

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << f_dd, f_sd, f_sd, f_ss;
    return m;
  }
};

/// Variance lower bounds for estimating phi_d from a single trial.
struct CrbReport {
  /// Tight two-parameter bound f_ss / (f_ss f_dd - f_sd^2); the honest limit when
  /// the sum phase is unknown. +infinity when the matrix is singular with coupling.
  double bound_phi_d = 0.0;
  /// Single-parameter reduction 1 / f_dd, valid only when the sum phase is known.
  double loose_bound_phi_d = 0.0;
  /// Shot-noise variance 1 / nbar.
  double snl = 0.0;
  double transmittance = 0.0;
  /// bound_phi_d < snl - 1e-12.
  bool beats_snl = false;
  /// True when the bound came from the single-parameter reduction (f_ss = f_sd = 0).
  bool degenerate = false;
};

/// 4(<g^2> - <g>^2) for a pure state. Throws std::invalid_argument on mixed input.
double qfi_pure(const fock::TwoModeState& state, const fock::Generator& gen);

/// One-arm-model QFI of the probe after a beam splitter of transmittance T:
/// 4 (T^2 V + T(1-T) nbar). Pure probe variants only.
double qfi_g1_general_t(const probe::ProbeSpec& spec, double transmittance);

/// Two-arm information matrix of the probe (x) vacuum after the beam splitter, in
/// closed form with u = 1-2T: f_dd = (1-u^2) nbar + u^2 V, f_ss = V, f_sd = -u V.
/// Pure probe variants only.
Qfim qfim_two_arm(const probe::ProbeSpec& spec, double transmittance);

/// The same matrix from generic moments 4(<g_i g_j> - <g_i><g_j>) of an explicit
/// pure state, as an independent cross-check of the closed forms.
Qfim qfim_from_moments(const fock::TwoModeState& state);

/// Tight and loose phi_d bounds with shot-noise bookkeeping. Branches: regular
/// inverse when f_ss f_dd - f_sd^2 > 1e-12 ||F||^2; single-parameter reduction
/// (flagged) when f_ss and f_sd vanish; +infinity otherwise.
CrbReport crb_phi_d(const Qfim& qfim, double nbar, double transmittance);

/// Mixed-state QFI via the symmetrized-logarithmic-derivative spectral formula
///   F_ij = 2 sum_{k,l} Re[ <k|d_i rho|l> <l|d_j rho|k> ] / (lambda_k + lambda_l),
/// with d_i rho = -i [g_i, rho] and eigenvalue pairs below 1e-12 skipped. Accepts
/// pure input (treated as a rank-1 density matrix); reduces to qfi_pure within 1e-8.
double qfi_mixed(const fock::TwoModeState& state, const fock::Generator& gen);
Qfim qfim_mixed(const fock::TwoModeState& state, const fock::Generator& g_first,
                const fock::Generator& g_second);

/// One-arm QFI after erasing the phase reference: sum_n p_n 4 n T (1-T)
/// = 4 T (1-T) nbar.
double qfi_phase_averaged(const probe::ProbeSpec& spec, double transmittance);

}  // namespace phaselim::fisher
