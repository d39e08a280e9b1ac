#pragma once

#include <stdexcept>
#include <string>

namespace phaselim {

/// Truncated Fock-space accuracy could not be certified: probability mass at or
/// beyond the cutoff exceeds the admissible tail tolerance.
class CutoffOverflow : public std::runtime_error {
 public:
  explicit CutoffOverflow(const std::string& what) : std::runtime_error(what) {}
};

/// Operator/state dimensions disagree.
class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// An outcome probability sits at (or numerically indistinguishable from) 0 or 1,
/// so sampling or likelihood inversion is ill-posed.
class DegenerateProbability : public std::runtime_error {
 public:
  explicit DegenerateProbability(const std::string& what) : std::runtime_error(what) {}
};

/// Likelihood inversion failed: the bracket does not enclose a monotone segment.
class NoRoot : public std::runtime_error {
 public:
  explicit NoRoot(const std::string& what) : std::runtime_error(what) {}
};

/// Run configuration is structurally invalid.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phaselim
