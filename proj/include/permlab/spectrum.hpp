#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "permlab/finite_dist.hpp"
#include "permlab/number.hpp"

namespace permlab {

enum class Reduction { none, row_multiset, full };
enum class SpectrumKind { exact, estimated };

Reduction parse_reduction(const std::string& name);
std::string to_string(Reduction r);

struct TargetEstimate {
  Int128 value = 0;
  std::uint64_t hits = 0;
  Rational estimate;  // hits / samples
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  /// max(estimate - ci_lo, ci_hi - estimate); equals ci_hi when hits == 0.
  double half_width = 1.0;
  bool upper_only() const { return hits == 0; }
};

/// Distribution of per(A_n). Exact spectra hold integer counts out of
/// `total` = D^(n^2), where D is the common denominator of the entry
/// probabilities (the support size for uniform entries). Estimated spectra
/// hold Monte Carlo hit counts for caller-chosen target values.
struct Spectrum {
  std::size_t n = 0;
  SpectrumKind kind = SpectrumKind::exact;
  BigInt total = 0;
  std::map<Int128, BigInt> counts;
  std::vector<TargetEstimate> estimates;

  Rational probability(Int128 value) const;
};

struct EnumerationOptions {
  Reduction reduction = Reduction::none;
  std::size_t workers = 1;
  double work_cap = 0x1p36;  // estimated minor-expansion steps
};

/// Exhaustive distribution of per(A_n) for i.i.d. entries with the given
/// integer-valued law. Reductions:
///  - row_multiset: the first n-1 rows are enumerated as multisets weighted by
///    multinomial coefficients (per is row-permutation invariant);
///  - full: entries uniform on {-a, a}; first row and column normalised to +a,
///    each canonical matrix standing for 2^(2n-2) matrices with per and
///    2^(2n-2) with -per.
/// The last row is always handled by expanding along it, so each prefix costs
/// n minors. Reductions other than none require uniform entry probabilities.
Spectrum exact_spectrum(std::size_t n, const FiniteDist& entry, const EnumerationOptions& opts = {});

/// Monte Carlo estimate of Pr[per(A_n) = x] for each target x. Sample i is
/// generated from CounterRng(seed, i), so results do not depend on workers.
/// Confidence intervals are exact binomial (Clopper-Pearson) at level 99%.
Spectrum mc_spectrum(std::size_t n, const FiniteDist& entry, const std::vector<Int128>& targets,
                     std::uint64_t samples, std::uint64_t seed, std::size_t workers = 1);

/// Q[per(A_n)] (exact) or the largest point estimate (estimated).
Rational q_max(const Spectrum& s);

/// Clopper-Pearson interval for `hits` successes out of `trials`.
std::pair<double, double> clopper_pearson(std::uint64_t hits, std::uint64_t trials, double confidence = 0.99);

std::string spectrum_to_json(const Spectrum& s);
std::string spectrum_to_csv(const Spectrum& s);

}  // namespace permlab
