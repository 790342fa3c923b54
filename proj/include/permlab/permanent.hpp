#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "permlab/int_matrix.hpp"
#include "permlab/number.hpp"

namespace permlab {

inline constexpr std::size_t kNaiveMaxSide = 10;
inline constexpr std::size_t kRyserMaxSide = 34;

/// Sum over all permutations of the diagonal products. Oracle use only
/// (side <= 10). The 0x0 permanent is 1.
Int128 per_naive(const IntMatrix& m);

/// Ryser inclusion-exclusion, subsets visited in Gray-code order so each
/// step updates the row sums with a single column. Overflow is detected
/// and reported together with the offending subset index.
Int128 per_ryser(const IntMatrix& m);

/// Signed permutation sum, side <= 10.
Int128 det_naive(const IntMatrix& m);

/// Default exact kernel (Ryser).
inline Int128 permanent(const IntMatrix& m) { return per_ryser(m); }

/// A[-I]: the first (universe - |I|) rows of the square matrix A, restricted
/// to the columns outside I (order preserved).
IntMatrix complement_submatrix(const IntMatrix& a, const ColumnSet& removed);

/// A[J]: the first |J| rows of A restricted to the columns in J.
IntMatrix leading_submatrix(const IntMatrix& a, const ColumnSet& kept);

/// A^{up s}: all but the last s rows. Requires 1 <= s <= rows.
IntMatrix upper_rows(const IntMatrix& a, std::size_t s);

struct MinorTerm {
  std::size_t column;  // 1-based, not in J
  Int128 coefficient;  // per(A[-(J+column)])
};

/// Expansion of per(A[-J]) along its last row, i.e. row (n+T-|J|) of A:
/// per(A[-J]) = sum over returned terms of A(row, column) * coefficient.
std::vector<MinorTerm> minor_expansion(const IntMatrix& a, const ColumnSet& j);

namespace detail {
/// Ryser on a dense row-major n x n block.
Int128 ryser_dense(const Entry* a, std::size_t n);
/// Permanents of the n column-deleted minors of a row-major (n-1) x n block;
/// out[j] = per(block without column j).
void column_deleted_minors(const Entry* block, std::size_t n, Int128* out);
}  // namespace detail

}  // namespace permlab
