#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "permlab/bracket.hpp"
#include "permlab/finite_dist.hpp"
#include "permlab/number.hpp"
#include "permlab/philox.hpp"

namespace permlab {

enum class Outcome { holds, fails, measured, precondition_failed };
std::string to_string(Outcome o);

/// Result of one inequality check. Exact checks set lhs/rhs and end in
/// holds/fails. Checks whose right side hides an unspecified constant end in
/// `measured` and carry the measured constant lhs/shape (exact square plus a
/// certified bracket of the root).
struct InequalityReport {
  std::string name;
  Outcome outcome = Outcome::holds;
  Rational lhs = 0;
  std::optional<Rational> rhs;
  std::optional<Rational> constant_squared;
  std::optional<Bracket> constant;
  std::vector<std::pair<std::string, std::string>> extra;  // additional named exact quantities
  std::string witness;                                     // JSON text
  std::string note;

  bool ok() const { return outcome == Outcome::holds || outcome == Outcome::measured; }
};

std::string report_to_json(const InequalityReport& r);

/// Q[X+Y] <= Q[X].
InequalityReport check_monotonicity(const FiniteDist& dx, const FiniteDist& dy);
/// Q[X1+X2]^2 <= Pr[X1=X1'] Pr[X2=X2'] (squared form).
InequalityReport check_duplication(const FiniteDist& d1, const FiniteDist& d2);
/// Exact Q[X1+...+Xm] against the shape p / sqrt((1-p) m). Throws
/// std::invalid_argument when some Q[X_i] > p or p is outside (0,1).
InequalityReport kesten_ratio(const std::vector<FiniteDist>& dists, const Rational& p);
/// Exact Q[X] against sqrt(k/n) * P/(1-P) with P = Pr[X_K^* = 0]. Inputs
/// violating k < n/4 or P < 1 - 4k/n give outcome precondition_failed.
InequalityReport check_relative_halasz(const ThinningSpec& spec);
/// P <= (1+p)/2 and (1+p)/2 < 1 - 4k/n, under 2/gamma <= k < (1-p)n/8 and
/// Q[X_i] <= p for at least gamma*n summands.
InequalityReport check_relative_assumption(const ThinningSpec& spec, const Rational& gamma, const Rational& p);

/// Size-s subsets of {1..n} as bitmasks (bit i-1 <-> element i).
struct SetFamily {
  std::size_t n = 0;
  std::size_t s = 0;
  std::vector<std::uint64_t> members;

  SetFamily() = default;
  SetFamily(std::size_t n, std::size_t s, std::vector<std::uint64_t> members);
  static std::uint64_t mask(const std::vector<std::size_t>& elements);
};

struct HeavyPairs {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;  // (F, G), G subset of F, |G| = s-1
  Rational degree_threshold;                                   // (alpha/2)(n-s+1)
  Rational size_guarantee;                                     // (alpha/2) s C(n,s)
};

/// All pairs (F, G) whose G lies in more than (alpha/2)(n-s+1) members.
/// Throws std::invalid_argument when |F| < alpha C(n,s); throws
/// std::logic_error if the size guarantee fails.
HeavyPairs heavy_pairs(const SetFamily& family, const Rational& alpha);

// Randomised batteries. Each runs `instances` draws from CounterRng(seed, i)
// and aggregates into a single report; failures are counted, and measured
// constants are reported as the supremum over the battery.
FiniteDist random_dist(CounterRng& rng, int max_support = 4, int value_range = 4);

struct BatteryConfig {
  std::uint64_t instances = 1000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

InequalityReport monotonicity_battery(const BatteryConfig& cfg);
InequalityReport duplication_battery(const BatteryConfig& cfg);
/// Rademacher sums for m = m_min..m_max with p = 1/2.
InequalityReport kesten_rademacher_battery(std::size_t m_min, std::size_t m_max);
/// Random thinning instances with n <= max_n; precondition failures are skipped.
InequalityReport halasz_battery(const BatteryConfig& cfg, std::size_t max_n = 10);
/// Random instances constructed to satisfy the corollary's preconditions.
InequalityReport assumption_battery(const BatteryConfig& cfg);
InequalityReport heavy_pairs_battery(const BatteryConfig& cfg);

}  // namespace permlab
