#include <cmath>

#include <doctest.h>

#include "phaselim/fock.hpp"
#include "phaselim/gaussian.hpp"

using namespace phaselim;

TEST_CASE("building blocks are symplectic") {
  CHECK(gaussian::is_symplectic(gaussian::symplectic_bs(0.3).s));
  CHECK(gaussian::is_symplectic(gaussian::symplectic_ps(0.7).s));
  CHECK(gaussian::is_symplectic(gaussian::symplectic_sq(0.9).s));
  CHECK_FALSE(gaussian::is_symplectic(2.0 * Eigen::Matrix4d::Identity()));

  SUBCASE("a transparent splitter is the identity") {
    CHECK((gaussian::symplectic_bs(1.0).s - Eigen::Matrix4d::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
  SUBCASE("the squeeze scales the two arm-A quadratures oppositely") {
    const Eigen::Matrix4d s = gaussian::symplectic_sq(0.4).s;
    CHECK(s(0, 0) == doctest::Approx(std::exp(-0.4)).epsilon(1e-14));
    CHECK(s(1, 1) == doctest::Approx(std::exp(+0.4)).epsilon(1e-14));
    CHECK(s(2, 2) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("detection chain covariance") {
  SUBCASE("zero phase restores the vacuum") {
    const gaussian::GaussianState out = gaussian::chain_output(0.7, 0.4, 0.0);
    CHECK((out.cov - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(gaussian::p00(out) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("no squeezing keeps the vacuum at any phase") {
    const gaussian::GaussianState out = gaussian::chain_output(0.0, 0.4, 0.9);
    CHECK((out.cov - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("covariance matches the number-basis chain") {
    const double r = 0.881373587019543, t = 0.5, phi = 0.1;
    const fock::TwoModeState fock_out =
        fock::squeeze_probe_chain(r, t, phi, fock::FockCutoff{64});
    const fock::QuadratureMoments qm = fock::quadrature_moments(fock_out);
    const gaussian::GaussianState gauss_out = gaussian::chain_output(r, t, phi);
    CHECK(qm.mean.cwiseAbs().maxCoeff() < 1e-9);
    CHECK((qm.covariance - gauss_out.cov).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("double-vacuum probability matches the number-basis projector") {
    const double r = 0.5, t = 0.3, phi = 0.25;
    const fock::TwoModeState fock_out =
        fock::squeeze_probe_chain(r, t, phi, fock::FockCutoff{48});
    CHECK(gaussian::p00(gaussian::chain_output(r, t, phi)) ==
          doctest::Approx(fock::povm_prob_double_vacuum(fock_out)).epsilon(1e-8));
  }
}

TEST_CASE("two-outcome information") {
  SUBCASE("approaches the closed-form zero-phase limit") {
    const double r = 0.881373587019543;  // nbar_tot = 2
    CHECK(gaussian::cfi_two_outcome(r, 0.5, 0.001) ==
          doctest::Approx(5.0).epsilon(1e-3));
  }
  SUBCASE("no squeezing carries no information") {
    const gaussian::CfiPoint point = gaussian::cfi_two_outcome_detail(0.0, 0.5, 0.2);
    CHECK(point.limit_path);
    CHECK(point.value == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("a dead splitter carries no information") {
    CHECK(std::abs(gaussian::cfi_two_outcome(0.6, 0.0, 0.3)) < 1e-6);
  }
  SUBCASE("finite phase stays at or below the zero-phase value") {
    for (const double r : {0.3, 0.7}) {
      for (const double t : {0.25, 0.5, 0.75}) {
        const double nbar_tot = 2.0 * std::pow(std::sinh(r), 2);
        const double limit = gaussian::cfi_limit(nbar_tot, t);
        for (const double phi : {0.05, 0.2, 0.4}) {
          CHECK(gaussian::cfi_two_outcome(r, t, phi) <= limit * (1.0 + 1e-9));
        }
      }
    }
  }
}

TEST_CASE("zero-phase information limit") {
  SUBCASE("frozen values") {
    CHECK(gaussian::cfi_limit(2.0, 0.5) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(gaussian::cfi_limit(2.0, 0.25) == doctest::Approx(1.75).epsilon(1e-14));
  }
  SUBCASE("balanced splitter attains nbar + number variance of the squeezed mode") {
    for (const double nbar : {0.3, 1.0, 2.4}) {
      const double variance = 2.0 * nbar * (nbar + 1.0);
      CHECK(gaussian::cfi_limit(2.0 * nbar, 0.5) ==
            doctest::Approx(nbar + variance).epsilon(1e-9));
    }
  }
  SUBCASE("small finite phase agrees with the limit to 0.1%") {
    for (const double r : {0.4, 0.881373587019543}) {
      for (const double t : {0.25, 0.5, 0.75}) {
        const double nbar_tot = 2.0 * std::pow(std::sinh(r), 2);
        const double limit = gaussian::cfi_limit(nbar_tot, t);
        CHECK(gaussian::cfi_two_outcome(r, t, 1e-4) ==
              doctest::Approx(limit).epsilon(1e-3));
      }
    }
  }
  SUBCASE("saturates the quantum bound 4 (T^2 V + T (1 - T) nbar) at every T") {
    for (const double r : {0.3, 0.6, 1.0}) {
      const double nbar = std::pow(std::sinh(r), 2);
      const double variance = 2.0 * nbar * (nbar + 1.0);
      for (const double t : {0.2, 0.5, 0.8}) {
        const double qfi = 4.0 * (t * t * variance + t * (1.0 - t) * nbar);
        CHECK(gaussian::cfi_limit(2.0 * nbar, t) == doctest::Approx(qfi).epsilon(1e-9));
      }
    }
  }
}
