#include "doctest.h"

#include <cmath>
#include <map>

#include "json.hpp"

#include "permlab/constants.hpp"

using namespace permlab;

namespace {

const Rational kHalf(1, 2);

Rational decimal(const char* digits, int places) {
  return Rational(BigInt(digits), pow_int(BigInt(10), static_cast<std::uint64_t>(places)));
}

const Constraint& find(const std::vector<Constraint>& cs, const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return c;
  FAIL("missing constraint " << name);
  throw std::logic_error("unreachable");
}

// Independent product 1 - prod_{s<=S}(1 - p^s) in floating point.
double partial_tau(double p, int terms) {
  double prod = 1, pw = 1;
  for (int s = 1; s <= terms; ++s) {
    pw *= p;
    prod *= 1 - pw;
  }
  return 1 - prod;
}

}  // namespace

TEST_CASE("tau brackets") {
  const Bracket t = tau(kHalf, decimal("1", 12));
  CHECK(t.width() <= decimal("1", 12));
  CHECK(t.lo > decimal("7112119", 7));
  CHECK(t.hi < decimal("7112120", 7));
  CHECK(static_cast<double>(t.lo) == doctest::Approx(partial_tau(0.5, 60)).epsilon(1e-12));

  const Bracket small = tau(Rational(1, 1000), decimal("1", 15));
  CHECK(small.lo > decimal("999", 6));
  CHECK(small.hi < decimal("1001", 6));

  const Bracket loose = tau(kHalf, Rational(1));
  CHECK(loose.lo > 0);
  CHECK(loose.hi < 1);
  CHECK(loose.contains(t.lo));

  const Bracket high = tau(Rational(9, 10), decimal("1", 6));
  CHECK(high.hi < 1);
  CHECK(high.width() <= decimal("1", 6));

  CHECK_THROWS_AS(tau(Rational(1), kHalf), std::invalid_argument);
  CHECK_THROWS_AS(tau(kHalf, Rational(0)), std::invalid_argument);
}

TEST_CASE("tau brackets nest under refinement") {
  for (const Rational& p : {Rational(1, 3), kHalf, Rational(3, 4)}) {
    Bracket prev = tau(p, Rational(1));
    for (int k = 1; k <= 40; k += 3) {
      const Bracket next = tau(p, pow_rat(kHalf, static_cast<std::uint64_t>(k)));
      CHECK(prev.lo <= next.lo);
      CHECK(next.hi <= prev.hi);
      prev = next;
    }
    for (std::size_t n = 0; n <= 30; ++n) CHECK(easy_fp_bound(p, n) <= prev.hi);
  }
}

TEST_CASE("easy fp bound") {
  CHECK(easy_fp_bound(kHalf, 0) == 0);
  CHECK(easy_fp_bound(kHalf, 1) == kHalf);
  CHECK(easy_fp_bound(kHalf, 2) == Rational(5, 8));
  const Bracket t = tau(kHalf, decimal("1", 15));
  Rational prev = 0;
  for (std::size_t n = 1; n <= 40; ++n) {
    const Rational v = easy_fp_bound(kHalf, n);
    CHECK(v >= prev);
    CHECK(v <= t.hi);
    prev = v;
  }
}

TEST_CASE("constant chain for p = 1/2") {
  const ConstantChain ch = derive_constants(kHalf, Rational(1, 10), 100);
  CHECK(ch.feasible());
  CHECK(ch.big_n == 100);
  CHECK(ch.mu >= Rational(1, 20));
  CHECK(ch.mu * 5 < 1 - ch.tau.hi);
  CHECK(ch.eps > 0);
  CHECK(ch.t >= 1);
  CHECK(ch.c > 0);
  CHECK(ch.c < Rational(1, 20));
  for (const char* name : {"tau_mu", "eps_mu", "eps_tau", "t_choice", "c_delta", "c_sqrt", "c_t"})
    CHECK(find(ch.constraints, name).satisfied);
  for (const auto& c : ch.constraints) {
    CAPTURE(c.name);
    CHECK(c.satisfied);
    CHECK(c.slack() >= 0);
  }

  // t is the least integer with p^t < ((1 - sqrt p) mu)^2.
  const double gap = (1 - std::sqrt(0.5)) * static_cast<double>(ch.mu);
  CHECK(std::pow(0.5, static_cast<double>(ch.t)) < gap * gap);
  CHECK(std::pow(0.5, static_cast<double>(ch.t - 1)) >= gap * gap);
}

TEST_CASE("constraints survive re-evaluation at doubled precision") {
  for (const Rational& p : {Rational(1, 3), kHalf, Rational(9, 10)}) {
    const ConstantChain ch = derive_constants(p, Rational(1, 10), 100);
    const auto again = evaluate_constraints(ch, 2 * kChainBits);
    REQUIRE(again.size() == ch.constraints.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
      CAPTURE(again[i].name);
      CHECK(again[i].name == ch.constraints[i].name);
      if (ch.constraints[i].satisfied) CHECK(again[i].satisfied);
    }
  }
}

TEST_CASE("extreme p and infeasible delta") {
  const ConstantChain high = derive_constants(Rational(9, 10), Rational(1, 10), 100);
  CHECK(high.feasible());
  CHECK(high.mu > 0);
  CHECK(high.c > 0);
  CHECK(high.big_n >= 100);

  const ConstantChain zero = derive_constants(kHalf, Rational(0), 100);
  CHECK_FALSE(zero.feasible());
  CHECK_FALSE(find(zero.constraints, "c_delta").satisfied);

  CHECK_THROWS_AS(derive_constants(Rational(0), Rational(1, 10), 100), std::invalid_argument);
  CHECK_THROWS_AS(derive_constants(kHalf, Rational(-1), 100), std::invalid_argument);
}

TEST_CASE("N is raised when exp(-delta N/2) exceeds mu") {
  const ConstantChain ch = derive_constants(kHalf, Rational(1, 10), 10);
  CHECK(ch.n_hyp == 10);
  CHECK(ch.big_n > 10);
  CHECK(find(ch.constraints, "N_mu").satisfied);
  CHECK(std::exp(-0.05 * static_cast<double>(ch.big_n - 1)) > static_cast<double>(ch.mu));
}

TEST_CASE("inductive step at N and beyond") {
  const ConstantChain ch = derive_constants(kHalf, Rational(1, 10), 100);
  const auto at_n = check_inductive_step(ch, {}, ch.big_n);
  CHECK(at_n.holds());
  CHECK_FALSE(at_n.first_failure.has_value());
  REQUIRE(at_n.lines.size() == 5);
  for (const auto& l : at_n.lines) CHECK(l.holds);
  CHECK(at_n.overall_slack.lo > 0);
  CHECK(at_n.lines[2].slack.lo == 0);
  CHECK(at_n.lines[2].slack.hi == 0);
  REQUIRE(at_n.alpha.size() == ch.t + 1);
  CHECK(at_n.alpha[ch.t] == ch.eps / 3);
  CHECK(at_n.alpha[0] > 0);

  // The exp(-delta n/2) slack grows with n.
  Rational prev = -1;
  for (std::uint64_t n : {ch.big_n + 1, 2 * ch.big_n, 5 * ch.big_n, 10 * ch.big_n}) {
    const auto r = check_inductive_step(ch, {}, n);
    CHECK(r.holds());
    CHECK(r.lines[2].slack.lo > prev);
    prev = r.lines[2].slack.lo;
  }

  // Supplying the bounds explicitly matches the default, and smaller bounds only help.
  std::map<std::uint64_t, Rational> f_vals;
  for (std::uint64_t m = ch.big_n - ch.t; m < ch.big_n; ++m) f_vals[m] = easy_fp_bound(kHalf, 1) / 1000000;
  CHECK(check_inductive_step(ch, f_vals, ch.big_n).holds());

  CHECK_THROWS(check_inductive_step(ch, {}, ch.big_n - 1));
}

TEST_CASE("negative control: mu too large") {
  ConstantChain broken = derive_constants(kHalf, Rational(1, 10), 100);
  broken.mu = Rational(1, 10);
  broken.constraints = evaluate_constraints(broken, kChainBits);
  CHECK_FALSE(broken.feasible());
  CHECK_FALSE(find(broken.constraints, "tau_mu").satisfied);
  const auto r = check_inductive_step(broken, {}, broken.big_n);
  CHECK_FALSE(r.holds());
  REQUIRE(r.first_failure.has_value());
  CHECK(*r.first_failure == 0);
}

TEST_CASE("chain and step json") {
  const ConstantChain ch = derive_constants(kHalf, Rational(1, 10), 100);
  const auto j = nlohmann::json::parse(chain_to_json(ch));
  CHECK(j["feasible"] == true);
  CHECK(j["N"] == 100);
  CHECK(j["constraints"].size() == ch.constraints.size());
  CHECK(j["tau"].contains("lo"));
  const auto s = nlohmann::json::parse(step_to_json(check_inductive_step(ch, {}, 100)));
  CHECK(s["holds"] == true);
  CHECK(s["first_failing_line"].is_null());
  CHECK(s["lines"].size() == 5);
}
