#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "permlab/permanent.hpp"
#include "permlab/philox.hpp"

using namespace permlab;

namespace {

IntMatrix random_matrix(CounterRng& rng, std::size_t rows, std::size_t cols, int lo, int hi) {
  IntMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = lo + static_cast<Entry>(rng.uniform(hi - lo + 1));
  return m;
}

IntMatrix permute_rows(const IntMatrix& m, const std::vector<std::size_t>& order) {
  IntMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(order[r], c);
  return out;
}

std::vector<std::size_t> random_permutation(CounterRng& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.uniform(i)]);
  return p;
}

}  // namespace

TEST_CASE("naive permanent examples") {
  CHECK(per_naive(IntMatrix{{7}}) == 7);
  CHECK(per_naive(IntMatrix(3, 3, 1)) == 6);
  CHECK(per_naive(IntMatrix{{1, 1}, {-1, 1}}) == 0);
  CHECK(per_naive(IntMatrix()) == 1);
  CHECK_THROWS(per_naive(IntMatrix(2, 3)));
  CHECK_THROWS(per_naive(IntMatrix(11, 11, 1)));
}

TEST_CASE("ryser permanent examples") {
  CHECK(per_ryser(IntMatrix(3, 3, 1)) == 6);
  CHECK(per_ryser(IntMatrix::identity(4)) == 1);
  CHECK(per_ryser(IntMatrix()) == 1);
  CHECK(per_ryser(IntMatrix{{1, 2}, {3, 4}}) == 10);
  CHECK_THROWS(per_ryser(IntMatrix(2, 3)));
  // per(J_20) = 20! fits; entries of 1000 on a 20 x 20 do not.
  CHECK(per_ryser(IntMatrix(20, 20, 1)) == Int128{2432902008176640000});
  CHECK_THROWS_AS(per_ryser(IntMatrix(20, 20, 1000)), OverflowError);
}

TEST_CASE("ryser agrees with naive on a seeded 5x5 sign matrix") {
  CounterRng rng(1, 0);
  IntMatrix m = random_matrix(rng, 5, 5, 0, 1);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) m(r, c) = m(r, c) ? 1 : -1;
  CHECK(per_ryser(m) == per_naive(m));
}

TEST_CASE("ryser agrees with naive on random matrices") {
  for (std::uint64_t i = 0; i < 2000; ++i) {
    CounterRng rng(11, i);
    const std::size_t n = 1 + rng.uniform(8);
    const IntMatrix m = random_matrix(rng, n, n, -3, 3);
    REQUIRE(per_ryser(m) == per_naive(m));
  }
}

TEST_CASE("determinant examples") {
  CHECK(det_naive(IntMatrix::identity(3)) == 1);
  CHECK(det_naive(IntMatrix{{1, 2}, {3, 4}}) == -2);
  CHECK(det_naive(IntMatrix(3, 3, 1)) == 0);
  CHECK(det_naive(IntMatrix()) == 1);
  const IntMatrix d{{2, 0, 0}, {0, -3, 0}, {0, 0, 5}};
  CHECK(det_naive(d) == per_naive(d));
}

TEST_CASE("permanent symmetries") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    CounterRng rng(12, i);
    const std::size_t n = 1 + rng.uniform(6);
    const IntMatrix m = random_matrix(rng, n, n, -3, 3);
    const Int128 p = per_ryser(m);
    CHECK(per_ryser(permute_rows(m, random_permutation(rng, n))) == p);
    CHECK(per_ryser(permute_rows(m.transpose(), random_permutation(rng, n))) == p);
    IntMatrix neg = m;
    const std::size_t r = rng.uniform(n);
    for (std::size_t c = 0; c < n; ++c) neg(r, c) = -neg(r, c);
    CHECK(per_ryser(neg) == -p);
    IntMatrix zero_row = m;
    for (std::size_t c = 0; c < n; ++c) zero_row(r, c) = 0;
    CHECK(per_ryser(zero_row) == 0);
  }
}

TEST_CASE("complement submatrix and upper rows") {
  const IntMatrix a{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  CHECK(complement_submatrix(a, ColumnSet(3, {})) == a);
  CHECK(complement_submatrix(a, ColumnSet(3, {2})) == IntMatrix{{1, 3}, {4, 6}});
  const IntMatrix b{{1, 2, 3, 4}, {5, 6, 7, 8}, {9, 10, 11, 12}, {13, 14, 15, 16}};
  CHECK(complement_submatrix(b, ColumnSet(4, {1, 4})) == IntMatrix{{2, 3}, {6, 7}});
  CHECK(complement_submatrix(b, ColumnSet(4, {1, 2, 3, 4})).rows() == 0);
  CHECK_THROWS(ColumnSet(3, {4}));
  CHECK_THROWS(ColumnSet(3, {2, 2}));

  CHECK(upper_rows(a, 1) == IntMatrix{{1, 2, 3}, {4, 5, 6}});
  CHECK(upper_rows(a, 3).rows() == 0);
  CHECK(upper_rows(IntMatrix(5, 5, 1), 2).rows() == 3);
  CHECK_THROWS(upper_rows(a, 0));
  CHECK_THROWS(upper_rows(a, 4));

  CHECK(leading_submatrix(a, ColumnSet(3, {1, 3})) == IntMatrix{{1, 3}, {4, 6}});
}

TEST_CASE("column set operations") {
  const ColumnSet s(5, {4, 1});
  CHECK(s.members() == std::vector<std::size_t>{1, 4});
  CHECK(s.contains(4));
  CHECK(s.with(2).members() == std::vector<std::size_t>{1, 2, 4});
  CHECK(s.without(1).members() == std::vector<std::size_t>{4});
  CHECK(s.complement().members() == std::vector<std::size_t>{2, 3, 5});
  CHECK_THROWS(s.with(4));
  CHECK_THROWS(s.without(3));
}

TEST_CASE("minor expansion examples") {
  const auto ones = minor_expansion(IntMatrix(3, 3, 1), ColumnSet(3, {}));
  REQUIRE(ones.size() == 3);
  for (const auto& t : ones) CHECK(t.coefficient == 2);

  const IntMatrix a{{1, 2}, {3, 4}};
  const auto terms = minor_expansion(a, ColumnSet(2, {}));
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].column == 1);
  CHECK(terms[0].coefficient == 2);
  CHECK(terms[1].column == 2);
  CHECK(terms[1].coefficient == 1);
  CHECK(3 * terms[0].coefficient + 4 * terms[1].coefficient == 10);

  const IntMatrix b{{2, -1, 3}, {0, 1, 1}, {5, 2, -2}};
  const auto single = minor_expansion(b, ColumnSet(3, {1, 3}));
  REQUIRE(single.size() == 1);
  CHECK(single[0].column == 2);
  CHECK(single[0].coefficient == 1);  // per of the 0x0 leftover
  CHECK(b(0, 1) * single[0].coefficient == per_naive(complement_submatrix(b, ColumnSet(3, {1, 3}))));
}

TEST_CASE("minor expansion identity on random inputs") {
  for (std::uint64_t i = 0; i < 500; ++i) {
    CounterRng rng(13, i);
    const std::size_t side = 1 + rng.uniform(7);
    const IntMatrix a = random_matrix(rng, side, side, -3, 3);
    const std::size_t js = rng.uniform(side);
    std::vector<std::size_t> members;
    for (std::size_t c : random_permutation(rng, side)) {
      if (members.size() == js) break;
      members.push_back(c + 1);
    }
    const ColumnSet j(side, members);
    const std::size_t row = side - js - 1;
    Int128 sum = 0;
    for (const auto& t : minor_expansion(a, j)) {
      CHECK(t.coefficient == per_naive(complement_submatrix(a, j.with(t.column))));
      sum += a(row, t.column - 1) * t.coefficient;
    }
    CHECK(sum == per_naive(complement_submatrix(a, j)));
  }
}

TEST_CASE("matrix text format round trip") {
  std::istringstream in("2 3\n1 -2 3\n−4 5 6\n");
  const IntMatrix m = read_matrix(in);
  CHECK(m == IntMatrix{{1, -2, 3}, {-4, 5, 6}});
  std::ostringstream out;
  write_matrix(out, m);
  std::istringstream back(out.str());
  CHECK(read_matrix(back) == m);

  std::istringstream short_input("2 2\n1 2 3\n");
  CHECK_THROWS_AS(read_matrix(short_input), ParseError);
  std::istringstream junk("2 2\n1 x 3 4\n");
  CHECK_THROWS_AS(read_matrix(junk), ParseError);
}
