#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "permlab/perm_range.hpp"
#include "permlab/permanent.hpp"

using namespace permlab;

namespace {

std::vector<Int128> brute_force(const std::vector<Entry>& support, std::size_t n) {
  const std::size_t cells = n * n;
  std::vector<std::size_t> digit(cells, 0);
  std::set<Int128> values;
  for (;;) {
    IntMatrix m(n, n);
    for (std::size_t c = 0; c < cells; ++c) m(c / n, c % n) = support[digit[c]];
    values.insert(per_naive(m));
    std::size_t c = 0;
    while (c < cells && ++digit[c] == support.size()) digit[c++] = 0;
    if (c == cells) break;
  }
  return {values.begin(), values.end()};
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("permlab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("range examples") {
  CHECK(phi({-1, 1}, 1).values == std::vector<Int128>{-1, 1});
  CHECK(phi({-1, 1}, 2).values == std::vector<Int128>{-2, 0, 2});
  CHECK(phi({0, 1}, 2).values == std::vector<Int128>{0, 1, 2});
  CHECK(phi({1, -1}, 2).support == std::vector<Entry>{-1, 1});
  CHECK_THROWS(phi({1, 1}, 2));
  CHECK_THROWS(phi({}, 2));
}

TEST_CASE("reduced ranges match brute force") {
  const std::vector<std::vector<Entry>> supports = {{-1, 1}, {0, 1}, {-2, 2}, {-1, 0, 1}, {1, 3}};
  for (const auto& s : supports)
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto oracle = brute_force(s, n);
      CHECK(phi(s, n).values == oracle);
      CHECK(phi(s, n, {Reduction::none, 1}).values == oracle);
      CHECK(phi(s, n, {Reduction::row_multiset, 2}).values == oracle);
    }
}

TEST_CASE("sign ranges are negation closed with max n!") {
  Int128 fact = 1;
  for (std::size_t n = 1; n <= 5; ++n) {
    fact *= static_cast<Int128>(n);
    const PermRange r = phi({-1, 1}, n);
    for (Int128 v : r.values) CHECK(r.contains(-v));
    CHECK(r.values.back() == fact);
    CHECK(r.values.front() == -fact);
  }
  for (Int128 v : phi({-1, 1}, 2).values) CHECK(v % 2 == 0);
}

TEST_CASE("worker count does not change the range") {
  CHECK(phi({-1, 1}, 5, {std::nullopt, 1}).values == phi({-1, 1}, 5, {std::nullopt, 4}).values);
  CHECK(phi({0, 1}, 4, {std::nullopt, 1}).values == phi({0, 1}, 4, {std::nullopt, 3}).values);
}

TEST_CASE("brualdi newman coverage with witnesses") {
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto res = check_brualdi_newman(n);
    CHECK(res.holds);
    const Int128 top = Int128{1} << (n - 1);
    CHECK(res.witnesses.size() >= static_cast<std::size_t>(top + 1));
    for (Int128 v = 0; v <= top; ++v) {
      REQUIRE(res.witnesses.count(v) == 1);
      const IntMatrix& w = res.witnesses.at(v);
      CHECK(w.rows() == n);
      for (Entry e : w.entries()) CHECK((e == 0 || e == 1));
      CHECK(per_naive(w) == v);
    }
  }
}

TEST_CASE("krauter lower bound") {
  for (std::size_t n = 1; n <= 5; ++n) CHECK(check_krauter(n));
  CHECK(check_krauter(phi({-1, 1}, 2)));
  PermRange tiny = phi({-1, 1}, 3);
  tiny.values.resize(2);
  CHECK_FALSE(check_krauter(tiny));
}

TEST_CASE("growth report") {
  const auto rows = growth_report(4);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].n == 1);
  CHECK(rows[0].count == 2);
  CHECK_FALSE(rows[0].log_ratio.has_value());
  CHECK(rows[1].count == 3);
  REQUIRE(rows[1].log_ratio.has_value());
  CHECK(*rows[1].log_ratio == doctest::Approx(std::log(1.5)));
  for (const auto& r : rows) CHECK(r.count == phi({-1, 1}, r.n).values.size());
}

TEST_CASE("range cache round trip and tamper detection") {
  const auto dir = scratch_dir("range_cache");
  const RangeCache cache(dir);
  const PermRange r = phi({-1, 1}, 3);
  CHECK_FALSE(cache.load({-1, 1}, 3).has_value());
  cache.store(r);
  const auto back = cache.load({-1, 1}, 3);
  REQUIRE(back.has_value());
  CHECK(back->values == r.values);
  CHECK(back->checksum() == r.checksum());

  const auto rows = growth_report(3, &cache);
  CHECK(rows[2].count == r.values.size());
  CHECK(std::filesystem::exists(cache.path_for({-1, 1}, 2)));

  {
    std::ofstream out(cache.path_for({-1, 1}, 3));
    out << R"({"support":[-1,1],"n":3,"values":["0"],"count":1,"sha":"00"})";
  }
  CHECK_FALSE(cache.load({-1, 1}, 3).has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("range json") {
  const PermRange r = phi({0, 1}, 2);
  const std::string text = range_to_json(r);
  const PermRange back = range_from_json(text);
  CHECK(back.values == r.values);
  CHECK(back.support == r.support);
  CHECK(back.n == 2);
  CHECK(r.checksum().size() == 64);
  CHECK(parse_support("-1, 1") == std::vector<Entry>{-1, 1});
  CHECK(parse_support("3,-2,0") == std::vector<Entry>{3, -2, 0});
  CHECK_THROWS(parse_support("1,,2"));
}
