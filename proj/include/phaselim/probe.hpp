#pragma once

#include <Eigen/Dense>
#include <complex>
#include <json.hpp>
#include <string>
#include <variant>

#include "phaselim/fock.hpp"

/// Declarative input states for interferometer mode A (mode B is always vacuum),
/// their photon-number statistics in closed form, and the phase-averaging map that
/// erases number coherences.
namespace phaselim::probe {

using fock::Complex;

struct FockProbe {
  int n = 0;
};
struct CoherentProbe {
  Complex alpha;
};
struct SqueezedVacuumProbe {
  double r = 0.0;
};
struct ThermalProbe {
  double nbar = 0.0;
};
/// Arbitrary single-mode density matrix in the number basis (Hermitian, trace 1,
/// PSD within 1e-10).
struct ExplicitProbe {
  Eigen::MatrixXcd c;
};

struct ProbeSpec {
  std::variant<FockProbe, CoherentProbe, SqueezedVacuumProbe, ThermalProbe, ExplicitProbe>
      value;

  static ProbeSpec fock(int n);
  static ProbeSpec coherent(Complex alpha);
  static ProbeSpec squeezed_vacuum(double r);
  static ProbeSpec thermal(double nbar);
  static ProbeSpec explicit_matrix(Eigen::MatrixXcd c);
};

/// Mean photon number, photon-number variance, and the number distribution p_n.
/// For the closed-form variants pn is carried to a length whose omitted tail is
/// below 1e-12, so sum(pn) = 1 within 1e-10.
struct PhotonStats {
  double nbar = 0.0;
  double var = 0.0;
  Eigen::VectorXd pn;
};

/// True for the pure variants (fock / coherent / squeezed vacuum).
bool is_pure(const ProbeSpec& spec);

/// Closed-form statistics: fock(n): (n, 0); coherent(alpha): (|alpha|^2, |alpha|^2);
/// squeezed(r): (sinh^2 r, 2 nbar (nbar + 1)); thermal(nbar): (nbar, nbar (nbar + 1));
/// explicit: moments of the stored diagonal.
PhotonStats photon_stats(const ProbeSpec& spec);

/// Randomize the overall phase: the result is the diagonal (number-basis) part of
/// the input, returned as an explicit diagonal probe (fock probes are returned
/// unchanged). Idempotent; preserves nbar and var up to the stored tail (< 1e-13).
ProbeSpec phase_average(const ProbeSpec& spec);

/// Smallest cutoff whose excluded mass (photon numbers >= n_max) is at most
/// tail_tol. Throws CutoffOverflow past n_max = 4096.
fock::FockCutoff auto_cutoff(const ProbeSpec& spec, double tail_tol = 1e-10);

/// Realize spec (x) vacuum_B on the given box. Pure variants yield pure states,
/// thermal/explicit yield density matrices; amplitudes are renormalized after
/// truncation (the discarded mass, certified <= tail_tol, bounds the bias).
fock::TwoModeState build_state(const ProbeSpec& spec, const fock::FockCutoff& cutoff);

/// Shorthand form: "fock:n=2", "coherent:alpha=1+0.5i", "squeezed:r=0.88",
/// "thermal:nbar=0.3". Squeezed also accepts nbar (r = arcsinh(sqrt(nbar))).
std::string to_string(const ProbeSpec& spec);
ProbeSpec parse_probe(const std::string& text);

/// JSON form: {"kind": "fock", "n": 2}, {"kind": "coherent", "alpha": {"re": 1,
/// "im": 0.5}}, {"kind": "squeezed", "r": 0.88}, {"kind": "thermal", "nbar": 0.3},
/// {"kind": "explicit", "re": [[...]], "im": [[...]]}. Coherent alpha also accepts
/// a plain number or the shorthand string.
void to_json(nlohmann::json& j, const ProbeSpec& spec);
void from_json(const nlohmann::json& j, ProbeSpec& spec);

}  // namespace phaselim::probe
