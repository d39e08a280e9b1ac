#pragma once

#include <cstdint>
#include <vector>

#include "phaselim/errors.hpp"

/// Monte Carlo check that maximum-likelihood estimation from the two-outcome
/// detection scheme saturates the classical Cramer-Rao bound.
namespace phaselim::mc {

struct Trial {
  long long m = 1;        ///< Bernoulli trials per estimate.
  int reps = 1;           ///< Independent estimates.
  std::uint64_t seed = 0; ///< Fully determines the outcome stream.
  double true_phi = 0.0;  ///< Phase at which outcomes are generated.
  double r = 0.0;         ///< Squeezing parameter of the detection scheme.
  double transmittance = 0.5;
};

struct EstimateReport {
  double phi_hat_mean = 0.0;
  double phi_hat_var = 0.0;
  double crb = 0.0;           ///< 1 / (m * CFI(true_phi)).
  double ratio = 0.0;         ///< phi_hat_var / crb.
  double stderr_of_var = 0.0; ///< Jackknife standard error of phi_hat_var.
  int boundary_hits = 0;      ///< Estimates clipped to the search bracket.
};

/// One stream of m Bernoulli outcomes (1 = both detectors dark) with success
/// probability P00(true_phi), reproducible from the seed. Throws
/// DegenerateProbability when P00 is within 1e-12 of 0 or 1.
std::vector<std::uint8_t> sample_outcomes(const Trial& trial);

/// Maximum-likelihood phase: P00 is strictly monotone on a bracket inside
/// (0, pi/2), so the binomial MLE is the bisection inverse of the dark-count
/// fraction, solved to 1e-10 in the probability residual. A fraction outside the
/// attainable range is clipped to the nearer bracket endpoint and flagged via
/// *clamped. Throws NoRoot for an invalid bracket (lo >= hi or outside
/// monotonicity).
double mle_phi(const std::vector<std::uint8_t>& outcomes, double r, double transmittance,
               double bracket_lo, double bracket_hi, bool* clamped = nullptr);

/// reps independent MLE estimates (substream per rep derived from the seed), their
/// variance against the Cramer-Rao bound, and the jackknife error of the variance.
/// Requires reps >= 2 and m * reps <= 1e9.
EstimateReport run_campaign(const Trial& trial);

}  // namespace phaselim::mc
