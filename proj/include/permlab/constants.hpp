#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "permlab/bracket.hpp"
#include "permlab/number.hpp"

namespace permlab {

/// Certified bracket of 1 - prod_{s>=1} (1 - p^s) of width <= tol, strictly
/// inside (0, 1). Partial products are exact and the tail uses
/// 1 >= prod_{s>S} (1 - p^s) >= 1 - p^{S+1}/(1-p); endpoints are then rounded
/// outward to a dyadic grid that refines with tol, so brackets for smaller tol
/// nest inside those for larger tol.
Bracket tau(const Rational& p, const Rational& tol);

/// 1 - prod_{s=1}^{n} (1 - p^s), exactly.
Rational easy_fp_bound(const Rational& p, std::size_t n);

struct Constraint {
  std::string name;
  std::string statement;
  Bracket lhs;
  Bracket rhs;
  bool strict = true;
  bool satisfied = false;  // certified lhs < rhs (or <= when not strict)
  Rational slack() const { return rhs.lo - lhs.hi; }
};

struct ConstantChain {
  Rational p;
  Rational delta;           // hypothesised
  std::uint64_t n_hyp = 0;  // hypothesised N
  std::uint64_t big_n = 0;  // N actually used (raised so that exp(-delta N/2) <= mu)
  Bracket tau;
  Rational mu;
  Rational eps;
  std::uint64_t t = 0;
  Rational c;
  std::vector<Constraint> constraints;

  bool feasible() const;
};

inline constexpr unsigned kChainBits = 256;

/// Re-evaluates every constraint of `chain` with brackets at `bits` precision
/// (tau is recomputed to tolerance 2^-(bits/4)).
std::vector<Constraint> evaluate_constraints(const ConstantChain& chain, unsigned bits);

/// mu: largest value on a dyadic grid with tau < 1 - 5 mu.
/// eps: half the largest value with eps < (1-sqrt p) mu and (1+eps) tau < 1 - 4 mu.
/// t: smallest integer with p^{t/2} < (1 - sqrt p) mu.
/// N: max(N_hyp, least N with exp(-delta N/2) <= mu).
/// c: largest value on a 64-step bisection of [0, delta/2] satisfying every
///    c-dependent constraint, including the base case tau < exp(-c N).
/// Throws std::invalid_argument for p outside (0,1) or delta < 0. An
/// infeasible delta (e.g. 0) yields a chain with failing constraints.
ConstantChain derive_constants(const Rational& p, const Rational& delta, std::uint64_t n_hyp);

std::string chain_to_json(const ConstantChain& chain);

struct StepLine {
  std::string name;
  Bracket value;  // value of this line of the chain
  Bracket slack;  // next line minus this line
  bool holds = false;
};

struct InductiveStepReport {
  std::uint64_t n = 0;
  std::vector<StepLine> lines;  // V0 .. V4, the last slack being 1 - V4
  std::optional<std::size_t> first_failure;
  Bracket overall_slack;  // 1 - V0
  std::vector<Rational> alpha;  // alpha_0 .. alpha_t
  bool holds() const { return !first_failure && overall_slack.lo > 0; }
};

/// Replays f(n) exp(c n) <= ... <= 1 for one n >= N with certified brackets.
/// `f_vals` maps m < n to a supplied bound on f(m); missing m use exp(-c m).
/// Terms shared by consecutive lines cancel exactly in the per-line slack.
InductiveStepReport check_inductive_step(const ConstantChain& chain, const std::map<std::uint64_t, Rational>& f_vals,
                                         std::uint64_t n, unsigned bits = kChainBits);

std::string step_to_json(const InductiveStepReport& r);

}  // namespace permlab
