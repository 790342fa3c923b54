#include "permlab/permanent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace permlab {

namespace {

void require_square(const IntMatrix& m, const char* who) {
  if (!m.square())
    throw std::invalid_argument(std::string(who) + ": matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", not square");
}

// True when every Ryser intermediate (row sums, their products and the running
// total over 2^n subsets) is below 2^62 in magnitude.
bool fits_int64(std::size_t n, Entry max_abs) {
  if (n == 0 || max_abs == 0) return true;
  const long double log2_bound =
      static_cast<long double>(n) * (1.0L + std::log2(static_cast<long double>(n) * max_abs));
  return log2_bound < 61.0L;
}

template <class Acc, bool Checked>
Int128 ryser_kernel(const Entry* a, std::size_t n) {
  std::array<Acc, kRyserMaxSide> row_sum{};
  Acc total = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const auto col = static_cast<std::size_t>(__builtin_ctzll(k));
    const std::uint64_t gray = k ^ (k >> 1);
    const bool added = (gray >> col) & 1;
    for (std::size_t i = 0; i < n; ++i) {
      const Acc e = a[i * n + col];
      row_sum[i] += added ? e : -e;
    }
    Acc prod = 1;
    for (std::size_t i = 0; i < n && prod != 0; ++i) {
      if constexpr (Checked) {
        if (__builtin_mul_overflow(prod, row_sum[i], &prod))
          throw OverflowError("per_ryser: 128-bit overflow in row-sum product at subset index " +
                              std::to_string(k) + " (gray code " + std::to_string(gray) + ")");
      } else {
        prod *= row_sum[i];
      }
    }
    // (-1)^{n-|S|}
    const bool negative = ((n - static_cast<std::size_t>(__builtin_popcountll(gray))) & 1) != 0;
    if constexpr (Checked) {
      const bool ok = negative ? !__builtin_sub_overflow(total, prod, &total)
                               : !__builtin_add_overflow(total, prod, &total);
      if (!ok)
        throw OverflowError("per_ryser: 128-bit overflow in running sum at subset index " + std::to_string(k));
    } else {
      total += negative ? -prod : prod;
    }
  }
  return static_cast<Int128>(total);
}

Entry max_abs_of(const Entry* a, std::size_t count) {
  Entry best = 0;
  for (std::size_t i = 0; i < count; ++i) best = std::max(best, a[i] < 0 ? -a[i] : a[i]);
  return best;
}

int permutation_sign(const std::vector<std::size_t>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

template <bool Signed>
Int128 permutation_sum(const IntMatrix& m, const char* who) {
  require_square(m, who);
  const std::size_t n = m.rows();
  if (n > kNaiveMaxSide)
    throw std::invalid_argument(std::string(who) + ": side " + std::to_string(n) + " exceeds oracle limit " +
                                std::to_string(kNaiveMaxSide));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Int128 total = 0;
  do {
    Int128 prod = 1;
    for (std::size_t i = 0; i < n && prod != 0; ++i)
      if (!checked_mul(prod, m(i, perm[i]), prod)) throw OverflowError(std::string(who) + ": 128-bit overflow");
    if constexpr (Signed) {
      if (permutation_sign(perm) < 0) prod = -prod;
    }
    if (!checked_add(total, prod, total)) throw OverflowError(std::string(who) + ": 128-bit overflow");
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace

namespace detail {

Int128 ryser_dense(const Entry* a, std::size_t n) {
  if (n == 0) return 1;
  if (n > kRyserMaxSide)
    throw std::invalid_argument("per_ryser: side " + std::to_string(n) + " exceeds " + std::to_string(kRyserMaxSide));
  if (n == 1) return a[0];
  if (n == 2) return static_cast<Int128>(a[0]) * a[3] + static_cast<Int128>(a[1]) * a[2];
  if (fits_int64(n, max_abs_of(a, n * n))) return ryser_kernel<std::int64_t, false>(a, n);
  return ryser_kernel<Int128, true>(a, n);
}

void column_deleted_minors(const Entry* block, std::size_t n, Int128* out) {
  std::array<Entry, kRyserMaxSide * kRyserMaxSide> minor{};
  const std::size_t m = n - 1;
  for (std::size_t skip = 0; skip < n; ++skip) {
    for (std::size_t r = 0; r < m; ++r) {
      std::size_t c_out = 0;
      for (std::size_t c = 0; c < n; ++c)
        if (c != skip) minor[r * m + c_out++] = block[r * n + c];
    }
    out[skip] = ryser_dense(minor.data(), m);
  }
}

}  // namespace detail

Int128 per_naive(const IntMatrix& m) { return permutation_sum<false>(m, "per_naive"); }

Int128 det_naive(const IntMatrix& m) { return permutation_sum<true>(m, "det_naive"); }

Int128 per_ryser(const IntMatrix& m) {
  require_square(m, "per_ryser");
  return detail::ryser_dense(m.entries().data(), m.rows());
}

IntMatrix complement_submatrix(const IntMatrix& a, const ColumnSet& removed) {
  if (!a.square()) throw std::invalid_argument("complement_submatrix: ambient matrix must be square");
  if (removed.universe() != a.cols())
    throw std::out_of_range("complement_submatrix: column set universe does not match matrix side");
  return leading_submatrix(a, removed.complement());
}

IntMatrix leading_submatrix(const IntMatrix& a, const ColumnSet& kept) {
  if (kept.universe() != a.cols()) throw std::out_of_range("leading_submatrix: universe does not match columns");
  const std::size_t k = kept.size();
  if (k > a.rows()) throw std::out_of_range("leading_submatrix: not enough rows");
  IntMatrix out(k, k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) out(r, c) = a(r, kept.members()[c] - 1);
  return out;
}

IntMatrix upper_rows(const IntMatrix& a, std::size_t s) {
  if (s < 1 || s > a.rows())
    throw std::out_of_range("upper_rows: s=" + std::to_string(s) + " outside 1.." + std::to_string(a.rows()));
  const std::size_t keep = a.rows() - s;
  std::vector<Entry> data(a.entries().begin(), a.entries().begin() + static_cast<std::ptrdiff_t>(keep * a.cols()));
  return IntMatrix(keep, a.cols(), std::move(data));
}

std::vector<MinorTerm> minor_expansion(const IntMatrix& a, const ColumnSet& j) {
  if (!a.square()) throw std::invalid_argument("minor_expansion: matrix must be square");
  if (j.universe() != a.cols()) throw std::out_of_range("minor_expansion: column set universe does not match");
  if (j.size() >= a.cols()) throw std::invalid_argument("minor_expansion: |J| must be below the matrix side");
  std::vector<MinorTerm> terms;
  for (std::size_t i = 1; i <= a.cols(); ++i) {
    if (j.contains(i)) continue;
    terms.push_back({i, per_ryser(complement_submatrix(a, j.with(i)))});
  }
  return terms;
}

}  // namespace permlab
