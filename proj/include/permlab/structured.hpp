#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "permlab/finite_dist.hpp"
#include "permlab/inequality_lab.hpp"
#include "permlab/int_matrix.hpp"

namespace permlab {

/// T fixed rows stacked over n random rows, all of width n + T. The fixed
/// block must contain a T x T submatrix with nonzero permanent; if the last T
/// columns do not already form one, columns are permuted so that the first
/// such submatrix found moves to the end (`column_order[c]` is the original
/// 1-based column now at position c+1). Every random entry needs Q <= p and
/// integer support.
class StructuredMatrixSpec {
 public:
  StructuredMatrixSpec(std::size_t T, std::size_t n, IntMatrix fixed, std::vector<FiniteDist> entry_dists,
                       Rational p);

  /// All random entries i.i.d. from `entry`, no fixed rows.
  static StructuredMatrixSpec iid(std::size_t n, const FiniteDist& entry, const Rational& p);

  std::size_t T() const { return T_; }
  std::size_t n() const { return n_; }
  std::size_t side() const { return n_ + T_; }
  const Rational& p() const { return p_; }
  const IntMatrix& fixed() const { return fixed_; }
  /// Distribution of random row `row` (0-based), column `col` (0-based).
  const FiniteDist& dist(std::size_t row, std::size_t col) const { return dists_[row * side() + col]; }
  const std::vector<std::size_t>& column_order() const { return column_order_; }

 private:
  std::size_t T_, n_;
  IntMatrix fixed_;
  std::vector<FiniteDist> dists_;
  Rational p_;
  std::vector<std::size_t> column_order_;
};

/// (n+T) x (n+T) realization, fixed rows first; deterministic in seed.
IntMatrix sample_structured(const StructuredMatrixSpec& spec, std::uint64_t seed);

/// More than alpha C(n,s) of the size-s subsets I of {1..n} have
/// per(A[-I]) != z. Only the first n+T-s rows of A are read.
bool event_E(const IntMatrix& a, const StructuredMatrixSpec& spec, Int128 z, std::size_t s, const Rational& alpha);

enum class CheckMode { exact, mc };

struct EasyBoundOptions {
  CheckMode mode = CheckMode::exact;
  std::uint64_t samples = 10000;  // mc: number of sampled upper blocks
  std::uint64_t seed = 0;
  std::uint64_t cap = std::uint64_t{1} << 22;  // enumerated outcomes per stage
};

/// For each (enumerated or sampled) outcome of the first n+T-s rows satisfying
/// E(s), the exact probability over the next row that per(A[-J]) = z for every
/// size-(s-1) subset J; lhs is the largest such probability and rhs is p^s.
InequalityReport check_easy_bound(const StructuredMatrixSpec& spec, std::size_t s, Int128 z,
                                  const EasyBoundOptions& opts = {});

/// Exact Pr[not E(s, alpha)] against f/(1-alpha). Without a supplied f the
/// bound uses max_I Pr[per(A[-I]) = 0] over size-s subsets I.
InequalityReport check_markov_bound(const StructuredMatrixSpec& spec, std::size_t s, const Rational& alpha,
                                    const std::optional<Rational>& f = std::nullopt,
                                    std::uint64_t cap = std::uint64_t{1} << 22);

struct ThinnedPair {
  IntMatrix astar;   // A[-J*] with its last row thinned
  IntMatrix aprime;  // astar with that row moved to position T+1
  Int128 per = 0;
};

/// With s = |J*| + 1: A* is A[-J*] whose last row (row n+T-s+1 of A) holds
/// xi_i - xi'_i in the columns of K and 0 elsewhere; A' moves that row directly
/// below the T fixed rows. `xi_prime` is indexed by original column (length
/// n+T). Throws std::out_of_range on index violations and std::logic_error if
/// per(A*) != per(A') or the last T entries of the thinned row are nonzero.
ThinnedPair thin_matrix(const IntMatrix& a, std::size_t T, const ColumnSet& jstar, const ColumnSet& k,
                        const std::vector<Entry>& xi_prime);

/// Every small spec with binary entry supports ({-1,1}, {0,1}, {1,2} and a
/// per-entry mix; p = 1/2): n <= max_n, T <= max_T, with all fixed rows in
/// {-1,0,1}^(n+1) for T = 1. check_easy_bound runs in exact mode for every
/// s in 1..n and z in [-2, 2]; the report holds iff every check holds.
InequalityReport easy_bound_family(std::size_t max_n = 3, std::size_t max_T = 1, std::size_t workers = 1);
/// check_markov_bound over the same specs for alpha in {0, 1/4, 1/3}, once with
/// the local f and once with f = easy_fp_bound(p, n-s).
InequalityReport markov_family(std::size_t max_n = 3, std::size_t max_T = 1, std::size_t workers = 1);

/// Random thin_matrix instances (side <= 6, entries in [-3,3]); returns the
/// number checked. Any violation propagates as an exception.
std::uint64_t thin_matrix_battery(std::uint64_t instances, std::uint64_t seed);

}  // namespace permlab
