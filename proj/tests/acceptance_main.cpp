// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with
// its runtime; the process exits nonzero if any criterion fails. Tolerances and
// runtime budgets are pinned here on purpose — edit them only with cause.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phaselim/estimation.hpp"
#include "phaselim/fisher.hpp"
#include "phaselim/fock.hpp"
#include "phaselim/gaussian.hpp"
#include "phaselim/numfmt.hpp"
#include "phaselim/probe.hpp"
#include "phaselim/runconfig.hpp"

using namespace phaselim;
using probe::ProbeSpec;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

void require_close(double value, double expected, double tol, const std::string& what) {
  if (!(std::abs(value - expected) <= tol))
    throw Failure(what + ": got " + detail::format_double(value) + ", expected " +
                  detail::format_double(expected) + " within " +
                  detail::format_double(tol));
}

void require_rel(double value, double expected, double rel, const std::string& what) {
  require_close(value, expected, rel * std::abs(expected), what);
}

// ---------------------------------------------------------------------------
// 1. The tight two-parameter bound equals 1/(4 T (1-T) nbar) for every probe,
//    never beats 1/nbar, and bottoms out at the balanced splitter.
void criterion_nogo_bound() {
  const ProbeSpec probes[] = {
      ProbeSpec::fock(1),
      ProbeSpec::fock(2),
      ProbeSpec::fock(3),
      ProbeSpec::coherent({1.0, 0.0}),
      ProbeSpec::coherent({2.0, 0.0}),
      ProbeSpec::squeezed_vacuum(std::asinh(std::sqrt(0.5))),
      ProbeSpec::squeezed_vacuum(std::asinh(std::sqrt(1.0))),
      ProbeSpec::squeezed_vacuum(std::asinh(std::sqrt(2.0)))};
  for (const ProbeSpec& spec : probes) {
    const double nbar = probe::photon_stats(spec).nbar;
    double best_bound = std::numeric_limits<double>::infinity();
    double best_t = 0.0;
    for (int i = 1; i <= 19; ++i) {
      const double t = 0.05 * i;
      const fisher::CrbReport crb =
          fisher::crb_phi_d(fisher::qfim_two_arm(spec, t), nbar, t);
      const double expected = 1.0 / (4.0 * t * (1.0 - t) * nbar);
      require_close(crb.bound_phi_d, expected, 1e-9,
                    probe::to_string(spec) + " bound at T=" +
                        detail::format_double(t));
      require(crb.bound_phi_d >= 1.0 / nbar - 1e-9,
              probe::to_string(spec) + " bound dips below 1/nbar at T=" +
                  detail::format_double(t));
      require(!crb.beats_snl,
              probe::to_string(spec) + " claims to beat the shot-noise limit");
      if (crb.bound_phi_d < best_bound) {
        best_bound = crb.bound_phi_d;
        best_t = t;
      }
    }
    require_close(best_t, 0.5, 1e-12,
                  probe::to_string(spec) + " bound minimum is away from T=1/2");
  }
}

// ---------------------------------------------------------------------------
// 2. The apparent violation: F_dd = 1.75 > nbar = 1, yet the two-parameter
//    bound 4/3 stays above the shot-noise variance 1.
void criterion_apparent_violation() {
  const ProbeSpec spec = ProbeSpec::squeezed_vacuum(std::asinh(1.0));
  const fisher::Qfim q = fisher::qfim_two_arm(spec, 0.25);
  require_close(q.f_dd, 1.75, 1e-9, "F_dd for the squeezed probe at T=0.25");
  require(q.f_dd > 1.0, "F_dd should exceed nbar = 1");
  const fisher::CrbReport crb = fisher::crb_phi_d(q, 1.0, 0.25);
  require_close(crb.bound_phi_d, 4.0 / 3.0, 1e-9, "two-parameter bound");
  require_close(crb.snl, 1.0, 1e-12, "shot-noise variance");
  require(crb.bound_phi_d > crb.snl, "bound should stay above the shot-noise limit");
  require(!crb.beats_snl, "beats_snl must be false");
}

// ---------------------------------------------------------------------------
// 3. Brute-force single-arm information of the split squeezed probe equals
//    nbar + V = 5 in a box of at least 40 levels.
void criterion_one_arm_qfi() {
  const ProbeSpec spec = ProbeSpec::squeezed_vacuum(std::asinh(1.0));
  const fock::TwoModeState out = fock::apply_beam_splitter(
      probe::build_state(spec, fock::FockCutoff{64}), 0.5);
  const double f = fisher::qfi_pure(out, fock::Generator::one_arm());
  require_rel(f, 5.0, 1e-6, "one-arm information of the split squeezed probe");
}

// ---------------------------------------------------------------------------
// 4. Phase averaging erases all coherence information: the spectral value on
//    the averaged state and the closed form both give nbar at T=1/2.
void criterion_phase_averaged() {
  const std::pair<ProbeSpec, double> cases[] = {
      {ProbeSpec::coherent({1.0, 0.0}), 1.0},
      {ProbeSpec::squeezed_vacuum(std::asinh(std::sqrt(0.5))), 0.5}};
  for (const auto& [spec, nbar] : cases) {
    const ProbeSpec averaged = probe::phase_average(spec);
    const fock::FockCutoff cutoff = probe::auto_cutoff(averaged, 1e-10);
    const fock::TwoModeState out = fock::apply_beam_splitter(
        probe::build_state(averaged, cutoff), 0.5);
    const double f = fisher::qfi_mixed(out, fock::Generator::one_arm());
    require_rel(f, nbar, 1e-6,
                probe::to_string(spec) + " averaged spectral information");
    require_close(fisher::qfi_phase_averaged(spec, 0.5), nbar, 1e-12,
                  probe::to_string(spec) + " averaged closed form");
  }
}

// ---------------------------------------------------------------------------
// 5. The determinant formula for the double-vacuum probability agrees with
//    the number-basis projector on the full 27-point grid.
void criterion_gaussian_fock_oracle() {
  for (const double r : {0.2, 0.5, 0.88}) {
    for (const double t : {0.25, 0.5, 0.75}) {
      for (const double phi : {0.05, 0.2, 0.5}) {
        const double p_gauss = gaussian::p00(gaussian::chain_output(r, t, phi));
        const fock::TwoModeState fock_out =
            fock::squeeze_probe_chain_auto(r, t, phi, 1e-9);
        const double p_fock = fock::povm_prob_double_vacuum(fock_out);
        require_close(p_gauss, p_fock, 1e-6,
                      "P00 mismatch at r=" + detail::format_double(r) +
                          " T=" + detail::format_double(t) +
                          " phi=" + detail::format_double(phi));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 6. The finite-difference information at phi = 1e-4 matches the closed-form
//    zero-phase limit to 0.1%, and reaches 5 > nbar_tot = 2 at the center.
void criterion_small_phase_cfi() {
  for (const double nbar : {0.5, 1.0, 2.0}) {
    const double r = std::asinh(std::sqrt(nbar));
    for (const double t : {0.25, 0.5, 0.75}) {
      const double limit = gaussian::cfi_limit(2.0 * nbar, t);
      const double fd = gaussian::cfi_two_outcome(r, t, 1e-4);
      require_rel(fd, limit, 1e-3,
                  "finite-difference information at nbar=" +
                      detail::format_double(nbar) +
                      " T=" + detail::format_double(t));
    }
  }
  const double center = gaussian::cfi_limit(2.0, 0.5);
  require_close(center, 5.0, 1e-12, "zero-phase information at nbar=1, T=1/2");
  require(center > 2.0, "information should exceed the total resource count 2");
}

// ---------------------------------------------------------------------------
// 7. The detection scheme attains the quantum limit at T=1/2:
//    cfi_limit(2 nbar, 1/2) = nbar + 2 nbar (nbar + 1).
void criterion_attainment_identity() {
  for (int i = 1; i <= 30; ++i) {
    const double nbar = 0.1 * i;
    require_close(gaussian::cfi_limit(2.0 * nbar, 0.5),
                  nbar + 2.0 * nbar * (nbar + 1.0), 1e-9,
                  "attainment identity at nbar=" + detail::format_double(nbar));
  }
}

// ---------------------------------------------------------------------------
// 8. Convexity: mixing probes never increases the information matrix.
void criterion_convexity() {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const fock::FockCutoff cutoff{6};

  const auto random_density = [&](int d) {
    Eigen::MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = fock::Complex(gauss(gen), gauss(gen));
    Eigen::MatrixXcd c = g * g.adjoint();
    c /= c.trace().real();
    return ProbeSpec::explicit_matrix(c);
  };
  const auto split = [&](const ProbeSpec& spec, double t) {
    return fock::apply_beam_splitter(probe::build_state(spec, cutoff), t);
  };

  for (int iter = 0; iter < 100; ++iter) {
    const int da = 2 + int(uni(gen) * 4.0);
    const int db = 2 + int(uni(gen) * 4.0);
    const double t = 0.1 + 0.8 * uni(gen);
    const double p = 0.05 + 0.9 * uni(gen);

    const fock::TwoModeState sigma = split(random_density(da), t);
    const fock::TwoModeState tau = split(random_density(db), t);
    const fock::TwoModeState mix = fock::TwoModeState::mixed(
        p * sigma.rho() + (1.0 - p) * tau.rho(), cutoff);

    const auto qfim = [](const fock::TwoModeState& s) {
      return fisher::qfim_mixed(s, fock::Generator::difference(),
                                fock::Generator::sum())
          .matrix();
    };
    const Eigen::Matrix2d slack =
        p * qfim(sigma) + (1.0 - p) * qfim(tau) - qfim(mix);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(slack);
    require(es.eigenvalues().minCoeff() >= -1e-8,
            "convexity violated at iteration " + std::to_string(iter) +
                ": min eigenvalue " +
                detail::format_double(es.eigenvalues().minCoeff()));
  }
}

// ---------------------------------------------------------------------------
// 9. A maximum-likelihood campaign saturates the Cramer-Rao bound.
void criterion_crb_saturation() {
  mc::Trial trial;
  trial.m = 10000;
  trial.reps = 500;
  trial.seed = 2;
  trial.true_phi = 0.15;
  trial.r = std::asinh(1.0);  // nbar = 1
  trial.transmittance = 0.5;
  const mc::EstimateReport report = mc::run_campaign(trial);
  require(report.ratio >= 0.9 && report.ratio <= 1.1,
          "variance/CRB ratio " + detail::format_double(report.ratio) +
              " outside [0.9, 1.1]");
  require(report.boundary_hits == 0, "estimates hit the search bracket");
}

// ---------------------------------------------------------------------------
// 10. Identical config and seed produce byte-identical CSV output.
void criterion_determinism() {
  cli::RunConfig config;
  config.command = "campaign";
  config.grid_t = {0.5};
  config.grid_r = {std::asinh(1.0)};
  config.grid_phi = {0.1, 0.2};
  config.m = 2000;
  config.reps = 50;
  config.seed = 9;
  config.output = "csv";

  char tmpl[] = "/tmp/phaselim_accept_XXXXXX";
  require(mkdtemp(tmpl) != nullptr, "cannot create temp directory");
  const std::string dir = tmpl;
  std::string text[2];
  for (int pass = 0; pass < 2; ++pass) {
    config.out_path = dir + "/rows_" + std::to_string(pass) + ".csv";
    std::ostringstream out, err;
    require(cli::run(config, out, err) == 0, "run failed: " + err.str());
    std::ifstream file(config.out_path, std::ios::binary);
    std::stringstream buffer;
    buffer << file.rdbuf();
    text[pass] = buffer.str();
    std::remove(config.out_path.c_str());
  }
  std::remove(dir.c_str());
  require(!text[0].empty(), "first run produced no output");
  require(text[0] == text[1], "repeated runs differ byte-for-byte");
}

struct Criterion {
  const char* name;
  void (*body)();
  double budget_s;  // 0 = no runtime cap
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"tight bound equals 1/(4T(1-T)nbar) and never beats 1/nbar",
       criterion_nogo_bound, 10.0},
      {"apparent sub-shot-noise gain dissolves under the joint bound",
       criterion_apparent_violation, 0.0},
      {"brute-force one-arm information reaches nbar + V = 5",
       criterion_one_arm_qfi, 5.0},
      {"phase-averaged probes carry exactly nbar of information",
       criterion_phase_averaged, 0.0},
      {"determinant and number-basis double-vacuum probabilities agree",
       criterion_gaussian_fock_oracle, 60.0},
      {"finite-phase information approaches the closed-form limit",
       criterion_small_phase_cfi, 0.0},
      {"on/off detection attains the quantum limit at T=1/2",
       criterion_attainment_identity, 0.0},
      {"information matrices are convex under probe mixing",
       criterion_convexity, 0.0},
      {"maximum-likelihood campaign saturates the Cramer-Rao bound",
       criterion_crb_saturation, 60.0},
      {"identical config and seed give byte-identical output",
       criterion_determinism, 0.0},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& criterion : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      criterion.body();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (error.empty() && criterion.budget_s > 0.0 && elapsed > criterion.budget_s)
      error = "runtime " + detail::format_double(elapsed) + " s exceeds budget " +
              detail::format_double(criterion.budget_s) + " s";
    char line[512];
    std::snprintf(line, sizeof(line), "[%2d] %s: %s (%.2f s)", index, criterion.name,
                  error.empty() ? "PASS" : "FAIL", elapsed);
    std::cout << line << "\n";
    if (!error.empty()) {
      std::cout << "     " << error << "\n";
      ++failures;
    }
  }
  if (failures == 0)
    std::cout << "all criteria passed\n";
  else
    std::cout << failures << " criterion(s) failed\n";
  return failures == 0 ? 0 : 1;
}
