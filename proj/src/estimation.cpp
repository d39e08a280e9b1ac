#include "phaselim/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "phaselim/gaussian.hpp"
#include "phaselim/numfmt.hpp"

namespace phaselim::mc {

namespace {

// Deterministic substream derivation: one splitmix64 scramble of (seed, index)
// decorrelates the per-rep mt19937_64 seeds.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform in [0, 1) from the top 53 bits; identical across platforms.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double dark_probability(const Trial& trial) {
  return gaussian::p00(
      gaussian::chain_output(trial.r, trial.transmittance, trial.true_phi));
}

}  // namespace

std::vector<std::uint8_t> sample_outcomes(const Trial& trial) {
  if (trial.m < 1) throw std::invalid_argument("trial count m must be >= 1");
  const double p = dark_probability(trial);
  if (p <= 1e-12 || p >= 1.0 - 1e-12)
    throw DegenerateProbability("dark-count probability " + detail::format_double(p) +
                                " leaves no information in the two-outcome model");
  std::mt19937_64 rng(trial.seed);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(trial.m));
  for (auto& b : bits) b = uniform01(rng) < p ? 1 : 0;
  return bits;
}

double mle_phi(const std::vector<std::uint8_t>& outcomes, double r, double transmittance,
               double bracket_lo, double bracket_hi, bool* clamped) {
  if (clamped) *clamped = false;
  if (!(bracket_lo < bracket_hi) || bracket_lo < 0.0 ||
      bracket_hi > std::numbers::pi / 2.0)
    throw NoRoot("invalid bracket [" + detail::format_double(bracket_lo) + ", " +
                 detail::format_double(bracket_hi) + "]");
  if (outcomes.empty()) throw std::invalid_argument("empty outcome vector");

  long long k = 0;
  for (const auto b : outcomes) k += b ? 1 : 0;
  const double frac = static_cast<double>(k) / static_cast<double>(outcomes.size());

  const auto p_at = [&](double phi) {
    return gaussian::p00(gaussian::chain_output(r, transmittance, phi));
  };
  // P00 decreases with phi on the bracket.
  const double p_lo = p_at(bracket_lo);
  const double p_hi = p_at(bracket_hi);
  if (frac >= p_lo) {
    if (clamped) *clamped = true;
    return bracket_lo;
  }
  if (frac <= p_hi) {
    if (clamped) *clamped = true;
    return bracket_hi;
  }
  double lo = bracket_lo, hi = bracket_hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double pm = p_at(mid);
    if (std::abs(pm - frac) <= 1e-10) return mid;
    if (pm > frac)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14) break;
  }
  return 0.5 * (lo + hi);
}

EstimateReport run_campaign(const Trial& trial) {
  if (trial.reps < 2)
    throw std::invalid_argument("campaign variance needs reps >= 2");
  if (trial.m < 1) throw std::invalid_argument("trial count m must be >= 1");
  if (static_cast<double>(trial.m) * trial.reps > 1e9)
    throw std::invalid_argument("campaign budget m * reps exceeds 1e9");

  // Refuse certain outcomes up front, before bracket construction can fail on
  // the same degenerate geometry with a less telling message.
  const double p_true =
      gaussian::p00(gaussian::chain_output(trial.r, trial.transmittance, trial.true_phi));
  if (!(p_true > 1e-12) || !(p_true < 1.0 - 1e-12))
    throw DegenerateProbability("double-vacuum probability " + detail::format_double(p_true) +
                                " at the true phase leaves nothing to estimate");

  const double fisher =
      gaussian::cfi_two_outcome(trial.r, trial.transmittance, trial.true_phi);
  if (!(fisher > 0.0))
    throw DegenerateProbability("two-outcome Fisher information vanishes at phi = " +
                                detail::format_double(trial.true_phi));
  const double crb = 1.0 / (static_cast<double>(trial.m) * fisher);

  // Bracket wide enough for every plausible estimate (12 predicted sigmas), but
  // bounded away from the degenerate origin and the monotonicity edge.
  const double sigma = std::sqrt(crb);
  const double lo = std::max(trial.true_phi * 0.25, trial.true_phi - 12.0 * sigma);
  const double hi = std::min({trial.true_phi * 2.5, trial.true_phi + 12.0 * sigma,
                              std::numbers::pi / 2.0});
  if (!(lo < hi)) throw NoRoot("campaign bracket is empty");

  std::vector<double> estimates(trial.reps);
  int boundary_hits = 0;
  for (int rep = 0; rep < trial.reps; ++rep) {
    Trial sub = trial;
    sub.seed = substream_seed(trial.seed, static_cast<std::uint64_t>(rep));
    const auto bits = sample_outcomes(sub);
    bool clamped = false;
    estimates[rep] = mle_phi(bits, trial.r, trial.transmittance, lo, hi, &clamped);
    boundary_hits += clamped ? 1 : 0;
  }

  const double n = static_cast<double>(trial.reps);
  double s1 = 0.0, s2 = 0.0;
  for (const double e : estimates) {
    s1 += e;
    s2 += e * e;
  }
  const double mean = s1 / n;
  const double var = (s2 - n * mean * mean) / (n - 1.0);

  // Jackknife: spread of the delete-one variance estimates (needs reps >= 3).
  double stderr_var = std::numeric_limits<double>::infinity();
  if (trial.reps >= 3) {
    double jsum = 0.0, jsum2 = 0.0;
    for (const double e : estimates) {
      const double m1 = (s1 - e) / (n - 1.0);
      const double ss = s2 - e * e - (n - 1.0) * m1 * m1;
      const double vi = ss / (n - 2.0);
      jsum += vi;
      jsum2 += vi * vi;
    }
    const double jmean = jsum / n;
    stderr_var = std::sqrt(std::max(0.0, (n - 1.0) / n * (jsum2 - n * jmean * jmean)));
  }

  EstimateReport report;
  report.phi_hat_mean = mean;
  report.phi_hat_var = var;
  report.crb = crb;
  report.ratio = var / crb;
  report.stderr_of_var = stderr_var;
  report.boundary_hits = boundary_hits;
  return report;
}

}  // namespace phaselim::mc
