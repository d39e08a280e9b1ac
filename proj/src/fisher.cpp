#include "phaselim/fisher.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace phaselim::fisher {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSldEigvalTol = 1e-12;

void require_pure_spec(const probe::ProbeSpec& spec, const char* what) {
  if (!probe::is_pure(spec))
    throw std::invalid_argument(std::string(what) +
                                " requires a pure probe (fock/coherent/squeezed)");
}

void check_transmittance(double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("transmittance must lie in [0, 1]");
}

// Shared SLD-formula core for a list of diagonal generators. Returns the matrix of
// F_ij over the generator list.
Eigen::MatrixXd sld_qfim(const fock::TwoModeState& state,
                         const std::vector<fock::Generator>& gens) {
  const int d = state.dim();
  Eigen::MatrixXcd rho;
  if (state.is_pure()) {
    Eigen::VectorXcd psi(d * d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) psi(a * d + b) = state.amp()(a, b);
    rho = psi * psi.adjoint();
  } else {
    rho = state.rho();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("density matrix eigendecomposition failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXcd& v = es.eigenvectors();

  std::vector<Eigen::MatrixXcd> a_mats;
  a_mats.reserve(gens.size());
  for (const auto& g : gens) {
    const Eigen::VectorXd gd = fock::diagonal_operator(g, state.cutoff);
    // d rho = -i [g, rho]; for diagonal g this is elementwise -i (g_k - g_l) rho_kl.
    Eigen::MatrixXcd drho(d * d, d * d);
    for (int k = 0; k < d * d; ++k)
      for (int l = 0; l < d * d; ++l)
        drho(k, l) = fock::Complex(0.0, -(gd(k) - gd(l))) * rho(k, l);
    a_mats.push_back(v.adjoint() * drho * v);
  }

  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(gens.size(), gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i; j < gens.size(); ++j) {
      double acc = 0.0;
      for (int k = 0; k < d * d; ++k) {
        for (int l = 0; l < d * d; ++l) {
          const double denom = lam(k) + lam(l);
          if (denom < kSldEigvalTol) continue;
          acc += (a_mats[i](k, l) * std::conj(a_mats[j](k, l))).real() / denom;
        }
      }
      f(i, j) = f(j, i) = 2.0 * acc;
    }
  }
  return f;
}

}  // namespace

double qfi_pure(const fock::TwoModeState& state, const fock::Generator& gen) {
  if (!state.is_pure())
    throw std::invalid_argument("qfi_pure requires a pure state (use qfi_mixed)");
  const Eigen::VectorXd g = fock::diagonal_operator(gen, state.cutoff);
  const double m1 = fock::expectation(state, g);
  const double m2 = fock::expectation(state, g.cwiseProduct(g).eval());
  return 4.0 * (m2 - m1 * m1);
}

double qfi_g1_general_t(const probe::ProbeSpec& spec, double transmittance) {
  require_pure_spec(spec, "qfi_g1_general_t");
  check_transmittance(transmittance);
  const probe::PhotonStats stats = probe::photon_stats(spec);
  return 4.0 * (transmittance * transmittance * stats.var +
                transmittance * (1.0 - transmittance) * stats.nbar);
}

Qfim qfim_two_arm(const probe::ProbeSpec& spec, double transmittance) {
  require_pure_spec(spec, "qfim_two_arm");
  check_transmittance(transmittance);
  const probe::PhotonStats stats = probe::photon_stats(spec);
  const double u = 1.0 - 2.0 * transmittance;
  Qfim q;
  q.f_dd = (1.0 - u * u) * stats.nbar + u * u * stats.var;
  q.f_ss = stats.var;
  q.f_sd = -u * stats.var;
  return q;
}

Qfim qfim_from_moments(const fock::TwoModeState& state) {
  if (!state.is_pure())
    throw std::invalid_argument("qfim_from_moments requires a pure state");
  const Eigen::VectorXd gd =
      fock::diagonal_operator(fock::Generator::difference(), state.cutoff);
  const Eigen::VectorXd gs = fock::diagonal_operator(fock::Generator::sum(), state.cutoff);
  const double ed = fock::expectation(state, gd);
  const double es = fock::expectation(state, gs);
  Qfim q;
  q.f_dd = 4.0 * (fock::expectation(state, gd.cwiseProduct(gd).eval()) - ed * ed);
  q.f_ss = 4.0 * (fock::expectation(state, gs.cwiseProduct(gs).eval()) - es * es);
  q.f_sd = 4.0 * (fock::expectation(state, gd.cwiseProduct(gs).eval()) - ed * es);
  return q;
}

CrbReport crb_phi_d(const Qfim& qfim, double nbar, double transmittance) {
  CrbReport report;
  report.transmittance = transmittance;
  report.snl = nbar > 0.0 ? 1.0 / nbar : kInf;
  report.loose_bound_phi_d = qfim.f_dd > 0.0 ? 1.0 / qfim.f_dd : kInf;

  const double fnorm2 = qfim.f_dd * qfim.f_dd + qfim.f_ss * qfim.f_ss +
                        2.0 * qfim.f_sd * qfim.f_sd;
  const double fnorm = std::sqrt(fnorm2);
  const double det = qfim.f_dd * qfim.f_ss - qfim.f_sd * qfim.f_sd;

  if (fnorm == 0.0) {
    report.bound_phi_d = kInf;
    report.degenerate = true;
  } else if (det > 1e-12 * fnorm2) {
    report.bound_phi_d = qfim.f_ss / det;
  } else if (std::abs(qfim.f_ss) <= 1e-12 * fnorm && std::abs(qfim.f_sd) <= 1e-12 * fnorm) {
    report.bound_phi_d = report.loose_bound_phi_d;
    report.degenerate = true;
  } else {
    report.bound_phi_d = kInf;
  }
  report.beats_snl = report.bound_phi_d < report.snl - 1e-12;
  return report;
}

double qfi_mixed(const fock::TwoModeState& state, const fock::Generator& gen) {
  return sld_qfim(state, {gen})(0, 0);
}

Qfim qfim_mixed(const fock::TwoModeState& state, const fock::Generator& g_first,
                const fock::Generator& g_second) {
  const Eigen::MatrixXd f = sld_qfim(state, {g_first, g_second});
  Qfim q;
  q.f_dd = f(0, 0);
  q.f_ss = f(1, 1);
  q.f_sd = f(0, 1);
  return q;
}

double qfi_phase_averaged(const probe::ProbeSpec& spec, double transmittance) {
  check_transmittance(transmittance);
  return 4.0 * transmittance * (1.0 - transmittance) * probe::photon_stats(spec).nbar;
}

}  // namespace phaselim::fisher
