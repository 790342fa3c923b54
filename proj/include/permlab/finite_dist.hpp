#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "permlab/int_matrix.hpp"
#include "permlab/number.hpp"

namespace permlab {

inline constexpr std::size_t kDefaultAtomCap = 1'000'000;
inline constexpr std::uint64_t kDefaultSubsetCap = 1'000'000;

/// Finite discrete distribution with exact rational values and probabilities.
/// Atoms are kept sorted by value; probabilities are positive and sum to 1.
class FiniteDist {
 public:
  using AtomMap = std::map<Rational, Rational>;

  FiniteDist() : atoms_{{Rational(0), Rational(1)}} {}
  /// Validates the invariants; zero-probability atoms are rejected.
  explicit FiniteDist(AtomMap atoms);
  FiniteDist(std::initializer_list<std::pair<Rational, Rational>> atoms);

  static FiniteDist point_mass(const Rational& v);
  static FiniteDist rademacher();
  /// Uniform over the given distinct values.
  static FiniteDist uniform(const std::vector<Rational>& values);

  const AtomMap& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  Rational prob(const Rational& v) const;
  bool degenerate() const { return atoms_.size() == 1; }
  FiniteDist negate() const;

  friend bool operator==(const FiniteDist&, const FiniteDist&) = default;

 private:
  struct Unchecked {};
  FiniteDist(AtomMap atoms, Unchecked) : atoms_(std::move(atoms)) {}
  friend FiniteDist convolve(const FiniteDist&, const FiniteDist&, std::size_t);

  AtomMap atoms_;
};

/// Distribution of X + Y for independent X ~ d1, Y ~ d2.
FiniteDist convolve(const FiniteDist& d1, const FiniteDist& d2, std::size_t atom_cap = kDefaultAtomCap);
/// Q[X] = max_x Pr[X = x].
Rational max_point_prob(const FiniteDist& d);
/// Pr[X = X'] = sum of squared atom probabilities.
Rational collision_prob(const FiniteDist& d);
/// Distribution of X - X' for an independent copy X'.
FiniteDist symmetrize(const FiniteDist& d, std::size_t atom_cap = kDefaultAtomCap);
/// Convolution of a list of distributions (point mass at 0 for an empty list).
FiniteDist convolve_all(const std::vector<FiniteDist>& ds, std::size_t atom_cap = kDefaultAtomCap);

/// X_1..X_n independent, and a uniformly random k-subset K of {1..n}.
struct ThinningSpec {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<FiniteDist> dists;

  ThinningSpec() = default;
  ThinningSpec(std::size_t k, std::vector<FiniteDist> dists);
};

/// Pr[X_K^* = 0] where X_K^* = sum_{i in K} (X_i - X_i'), averaged exactly
/// over all C(n,k) subsets. Identical summand distributions are grouped so
/// that the subset average runs over compositions rather than raw subsets.
Rational star_zero_prob(const ThinningSpec& spec, std::uint64_t subset_cap = kDefaultSubsetCap,
                        std::size_t atom_cap = kDefaultAtomCap);

/// Pr[K cap I = empty] for K a uniform k-subset of {1..n} and |I| = isize.
Rational hypergeometric_empty_prob(std::uint64_t n, std::uint64_t k, std::uint64_t isize);

/// Uniform k-subset of {1..n}, deterministic in seed.
ColumnSet sample_subset(std::size_t n, std::size_t k, std::uint64_t seed);

/// Converts an integer-valued Rational to a matrix entry; throws otherwise.
Entry to_entry(const Rational& v);

/// Samples an integer-valued FiniteDist from a uniform integer source.
/// Requires the common probability denominator to fit in 64 bits.
class IntegerSampler {
 public:
  explicit IntegerSampler(const FiniteDist& d);

  template <class Rng>
  Entry operator()(Rng& rng) const {
    const std::uint64_t draw = rng.uniform(denominator_);
    std::size_t i = 0;
    while (draw >= cumulative_[i]) ++i;
    return values_[i];
  }

  const std::vector<Entry>& values() const { return values_; }

 private:
  std::vector<Entry> values_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t denominator_ = 1;
};

// Text format: one "value numerator/denominator" line per atom; '#' comments.
FiniteDist read_dist(std::istream& in);
void write_dist(std::ostream& out, const FiniteDist& d);
/// JSON form: [{"v": "value", "p": "a/b"}, ...].
std::string dist_to_json(const FiniteDist& d);
FiniteDist dist_from_json(const std::string& text);

}  // namespace permlab
