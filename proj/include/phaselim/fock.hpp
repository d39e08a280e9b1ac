#pragma once

#include <Eigen/Dense>
#include <complex>

#include "phaselim/errors.hpp"

/// Truncated two-mode Fock-space engine.
///
/// This is the numerical ground truth the closed-form modules are checked against.
/// States live on the box {0..n_max} x {0..n_max}; every constructor and circuit
/// element certifies that the probability mass it cannot represent stays below the
/// cutoff's tail tolerance, and throws CutoffOverflow otherwise.
///
/// Conventions (fixed project-wide, see gaussian.hpp for the matching symplectic
/// matrices):
///  * beam splitter: quadrature/coherent means transform by the real orthogonal
///    matrix with rows (sqrt(T), sqrt(1-T)) and (-sqrt(1-T), sqrt(T)), i.e.
///    |alpha, beta> -> |sqrt(T) a + sqrt(1-T) b, -sqrt(1-T) a + sqrt(T) b>;
///  * apply_phase multiplies amplitudes by exp(+i g(n_a, n_b) phi);
///  * single-mode squeeze is exp((r/2)(a^2 - a^dag^2)), so the position-quadrature
///    variance of squeezed vacuum is exp(-2r) with vacuum variance 1.
namespace phaselim::fock {

using Complex = std::complex<double>;

/// Truncation contract: states occupy photon numbers 0..n_max per mode and the
/// admissible probability mass at or beyond n_max is tail_tol.
struct FockCutoff {
  int n_max = 0;
  double tail_tol = 1e-10;

  int dim() const { return n_max + 1; }
};

/// Phase-shift generators, all diagonal in the two-mode number basis.
/// Difference mode: (n_a - n_b)/2. Sum mode: (n_a + n_b)/2. One arm: n_a.
enum class GeneratorKind { Difference, Sum, OneArm };

struct Generator {
  GeneratorKind kind = GeneratorKind::OneArm;

  double value(int n_a, int n_b) const {
    switch (kind) {
      case GeneratorKind::Difference: return 0.5 * (n_a - n_b);
      case GeneratorKind::Sum: return 0.5 * (n_a + n_b);
      case GeneratorKind::OneArm: return n_a;
    }
    return 0.0;
  }

  static Generator difference() { return {GeneratorKind::Difference}; }
  static Generator sum() { return {GeneratorKind::Sum}; }
  static Generator one_arm() { return {GeneratorKind::OneArm}; }
};

enum class Mode { A, B };

/// Two-mode state on the truncated box.
///
/// Pure states store the amplitude tensor amp(n_a, n_b) as a dim x dim complex
/// matrix. Mixed states store the density matrix over the flattened index
/// i = n_a * dim + n_b as a dim^2 x dim^2 complex matrix.
struct TwoModeState {
  enum class Kind { Pure, Mixed };

  Kind kind = Kind::Pure;
  Eigen::MatrixXcd data;
  FockCutoff cutoff;

  int dim() const { return cutoff.dim(); }
  bool is_pure() const { return kind == Kind::Pure; }

  const Eigen::MatrixXcd& amp() const;
  const Eigen::MatrixXcd& rho() const;

  /// Pure: squared norm. Mixed: trace (real part).
  double weight() const;

  /// |0,0> on the given box.
  static TwoModeState vacuum(const FockCutoff& cutoff);
  /// Pure state from an amplitude tensor (dim x dim).
  static TwoModeState pure(Eigen::MatrixXcd amplitudes, const FockCutoff& cutoff);
  /// Mixed state from a density matrix (dim^2 x dim^2, flattened index).
  static TwoModeState mixed(Eigen::MatrixXcd density, const FockCutoff& cutoff);
};

/// Probability mass on the boundary shell n_a = n_max or n_b = n_max. This is the
/// certificate that the box did not clip the state.
double tail_mass(const TwoModeState& state);

/// Probability mass on total-photon sectors that cross the cutoff (n_a + n_b > n_max).
/// The beam splitter mixes within such sectors only partially inside the box, so this
/// mass bounds its deviation from unitarity.
double sector_overflow_mass(const TwoModeState& state);

/// Beam-splitter transformation of transmittance T in [0, 1]; see the header comment
/// for the sign convention. Exactly photon-number conserving. Throws CutoffOverflow
/// when the input carries more than tail_tol on sectors crossing the cutoff.
TwoModeState apply_beam_splitter(const TwoModeState& state, double transmittance);

/// Inverse beam splitter (adjoint of apply_beam_splitter at the same transmittance).
TwoModeState apply_beam_splitter_adjoint(const TwoModeState& state, double transmittance);

/// Multiply amplitudes by exp(+i g(n_a, n_b) phi) (pure), or conjugate the density
/// matrix by that diagonal unitary (mixed). Exactly norm/trace preserving.
TwoModeState apply_phase(const TwoModeState& state, const Generator& g, double phi);

/// Single-mode squeeze exp((r/2)(a^2 - a^dag^2)) on the chosen mode, built as the
/// exact spectral exponential of the truncated generator (orthogonal by construction,
/// unitarity defect certified <= 1e-9). Throws CutoffOverflow when the result leaves
/// more than tail_tol on the boundary shell.
TwoModeState apply_single_mode_squeeze(const TwoModeState& state, double r, Mode mode);

/// The dense squeeze matrix on a single mode of dimension dim (exposed for tests).
Eigen::MatrixXd squeeze_matrix(double r, int dim);

/// exp(scale * G) for the real antisymmetric tridiagonal G with G(k+1,k) = sub(k)
/// = -G(k,k+1), via spectral decomposition (exposed for tests; used by the squeeze).
Eigen::MatrixXd orthogonal_exp_tridiagonal(const Eigen::VectorXd& sub, double scale);

/// Diagonal of a generator over the flattened two-mode index.
Eigen::VectorXd diagonal_operator(const Generator& g, const FockCutoff& cutoff);

/// Diagonal of the photon-number operator of one mode over the flattened index.
Eigen::VectorXd number_operator(Mode mode, const FockCutoff& cutoff);

/// <diag_op> for a diagonal observable given as its flattened diagonal.
double expectation(const TwoModeState& state, const Eigen::VectorXd& diagonal);

/// <op> for a general observable over the flattened index (dim^2 x dim^2).
Complex expectation(const TwoModeState& state, const Eigen::MatrixXcd& op);

/// Projective probability of finding both detectors dark: <0,0| rho |0,0>.
double povm_prob_double_vacuum(const TwoModeState& state);

/// Photon-number distribution of one mode (marginal over the other).
Eigen::VectorXd photon_distribution(const TwoModeState& state, Mode mode);

/// Distribution of the total photon number n_a + n_b (length 2 n_max + 1).
Eigen::VectorXd total_photon_distribution(const TwoModeState& state);

/// First and symmetrized second quadrature moments of a pure state, in the ordering
/// (x_a, p_a, x_b, p_b) with x = a + a^dag, p = i(a^dag - a), vacuum covariance = I.
struct QuadratureMoments {
  Eigen::Vector4d mean;
  Eigen::Matrix4d covariance;
};
QuadratureMoments quadrature_moments(const TwoModeState& state);

/// Full on/off-detection circuit: squeeze mode A by r, beam-split (T), shift the
/// phase of arm A by phi_a, invert the beam splitter, anti-squeeze mode A. The
/// double-dark probability of the result is the measured signal.
TwoModeState squeeze_probe_chain(double r, double transmittance, double phi_a,
                                 const FockCutoff& cutoff);

/// Same chain, growing n_max (doubling) until every tail certification passes.
TwoModeState squeeze_probe_chain_auto(double r, double transmittance, double phi_a,
                                      double tail_tol = 1e-10);

}  // namespace phaselim::fock
