#include "permlab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace permlab {

namespace {

namespace mp = boost::multiprecision;
using ojson = nlohmann::ordered_json;

constexpr int kDigits = 40;

void require_p(const Rational& p) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must lie in (0, 1)");
}

Rational pow2_neg(unsigned b) { return Rational(BigInt(1), BigInt(1) << b); }

// Rough log2 of a positive rational.
long log2_estimate(const Rational& q) {
  return static_cast<long>(mp::msb(mp::numerator(q))) - static_cast<long>(mp::msb(mp::denominator(q)));
}

std::string lower_decimal(const Rational& q) { return decimal_string(q, kDigits); }
std::string upper_decimal(const Rational& q) {
  return decimal_string(q + Rational(BigInt(1), mp::pow(BigInt(10), kDigits)), kDigits);
}

ojson bracket_json(const Bracket& b) {
  ojson j;
  j["lo"] = lower_decimal(b.lo);
  j["hi"] = upper_decimal(b.hi);
  return j;
}

Constraint make(std::string name, std::string statement, Bracket lhs, Bracket rhs, bool strict = true) {
  Constraint c{std::move(name), std::move(statement), std::move(lhs), std::move(rhs), strict, false};
  c.satisfied = strict ? certainly_less(c.lhs, c.rhs) : certainly_leq(c.lhs, c.rhs);
  return c;
}

struct Ctx {
  unsigned bits;
  Bracket tau;
  Bracket sqrt_p;
};

// Constraints that involve c; shared by the bisection and the final report.
std::vector<Constraint> c_constraints(const ConstantChain& ch, const Ctx& x) {
  const Rational& c = ch.c;
  std::vector<Constraint> out;
  out.push_back(make("c_delta", "c < delta/2", Bracket::exact(c), Bracket::exact(ch.delta / 2)));
  out.push_back(make("c_sqrt", "exp(c) < p^(-1/2), as p exp(2c) < 1",
                     mul(Bracket::exact(ch.p), exp_bracket(2 * c, x.bits), x.bits), Bracket::exact(1)));
  out.push_back(make("c_t", "(1-4mu) exp(c t) < 1-3mu",
                     mul(Bracket::exact(1 - 4 * ch.mu), exp_bracket(c * Rational(ch.t), x.bits), x.bits),
                     Bracket::exact(1 - 3 * ch.mu)));
  out.push_back(make("base_case", "tau_p < exp(-c N), so f_p(n) <= tau_p < exp(-c n) for n <= N", x.tau,
                     exp_bracket(-c * Rational(ch.big_n), x.bits)));
  out.push_back(make("c_positive", "c > 0", Bracket::exact(0), Bracket::exact(c)));
  return out;
}

std::vector<Constraint> all_constraints(const ConstantChain& ch, const Ctx& x) {
  std::vector<Constraint> out;
  const Rational& mu = ch.mu;
  const Rational& eps = ch.eps;
  out.push_back(make("tau_mu", "tau_p < 1-5mu", x.tau, Bracket::exact(1 - 5 * mu)));
  out.push_back(make("eps_positive", "eps > 0", Bracket::exact(0), Bracket::exact(eps)));
  // eps < (1 - sqrt p) mu  <=>  mu > eps and p mu^2 < (mu - eps)^2.
  Constraint eps_mu = make("eps_mu", "eps < (1-sqrt(p)) mu, as p mu^2 < (mu-eps)^2", Bracket::exact(ch.p * mu * mu),
                           Bracket::exact((mu - eps) * (mu - eps)));
  eps_mu.satisfied = eps_mu.satisfied && mu > eps;
  out.push_back(std::move(eps_mu));
  out.push_back(make("eps_tau", "(1+eps) tau_p < 1-4mu", mul(Bracket::exact(1 + eps), x.tau, x.bits),
                     Bracket::exact(1 - 4 * mu)));
  const Bracket gap = mul(Bracket::exact(1) - x.sqrt_p, Bracket::exact(mu), x.bits);
  out.push_back(make("t_choice", "p^(t/2) < (1-sqrt(p)) mu, as p^t < ((1-sqrt(p)) mu)^2",
                     Bracket::exact(pow_rat(ch.p, ch.t)), mul(gap, gap, x.bits)));
  out.push_back(make("N_mu", "exp(-delta N/2) <= mu", exp_bracket(-ch.delta * Rational(ch.big_n) / 2, x.bits),
                     Bracket::exact(mu), false));
  for (auto& c : c_constraints(ch, x)) out.push_back(std::move(c));
  return out;
}

Ctx make_ctx(const Rational& p, unsigned bits) {
  return {bits, tau(p, pow2_neg(bits / 4)), sqrt_bracket(p, bits)};
}

}  // namespace

Bracket tau(const Rational& p, const Rational& tol) {
  require_p(p);
  if (tol <= 0) throw std::invalid_argument("tau: tol must be positive");
  unsigned b = 2;
  while (pow2_neg(b) > tol / 4) ++b;

  Rational prod = 1, pw = 1, tail;
  std::size_t S = 0;
  // The first S whose tail is below 1 fixes a tol-independent floor on b that
  // keeps the rounded bracket strictly inside (0, 1).
  std::optional<Bracket> first;
  for (;;) {
    ++S;
    pw *= p;
    prod *= 1 - pw;
    tail = pw * p / (1 - p);
    if (tail < 1 && !first) first = Bracket{1 - prod, 1 - prod * (1 - tail)};
    if (tail < 1 && tail <= tol / 2) break;
  }
  while (round_down(first->lo, b) <= 0 || round_up(first->hi, b) >= 1) ++b;
  return {round_down(1 - prod, b), round_up(1 - prod * (1 - tail), b)};
}

Rational easy_fp_bound(const Rational& p, std::size_t n) {
  require_p(p);
  Rational prod = 1, pw = 1;
  for (std::size_t s = 1; s <= n; ++s) {
    pw *= p;
    prod *= 1 - pw;
  }
  return 1 - prod;
}

bool ConstantChain::feasible() const {
  return !constraints.empty() &&
         std::all_of(constraints.begin(), constraints.end(), [](const Constraint& c) { return c.satisfied; });
}

std::vector<Constraint> evaluate_constraints(const ConstantChain& chain, unsigned bits) {
  return all_constraints(chain, make_ctx(chain.p, bits));
}

ConstantChain derive_constants(const Rational& p, const Rational& delta, std::uint64_t n_hyp) {
  require_p(p);
  if (delta < 0) throw std::invalid_argument("derive_constants: delta must be >= 0");
  const Ctx x = make_ctx(p, kChainBits);
  ConstantChain ch;
  ch.p = p;
  ch.delta = delta;
  ch.n_hyp = n_hyp;
  ch.tau = x.tau;

  // mu on a grid about 2^-24 finer than mu itself.
  const Rational mu_max = (1 - x.tau.hi) / 5;
  const auto g = static_cast<unsigned>(24 - std::min(0L, log2_estimate(mu_max)) + 1);
  ch.mu = round_down(mu_max, g);
  if (ch.mu == mu_max) ch.mu -= pow2_neg(g);

  const Rational e1 = (1 - x.sqrt_p.hi) * ch.mu;
  const Rational e2 = (1 - 4 * ch.mu) / x.tau.hi - 1;
  const Rational e_max = std::min(e1, e2);
  ch.eps = e_max > 0 ? round_down(e_max / 2, g + 8) : Rational(0);

  const Rational target = (1 - x.sqrt_p.hi) * (1 - x.sqrt_p.hi) * ch.mu * ch.mu;
  ch.t = 1;
  for (Rational pw = p; !(pw < target); pw *= p) ++ch.t;

  ch.big_n = n_hyp;
  if (delta > 0) {
    auto ok = [&](std::uint64_t n) {
      return exp_bracket(-delta * Rational(n) / 2, kChainBits).hi <= ch.mu;
    };
    const double est = 2.0 * std::log(1.0 / ch.mu.convert_to<double>()) / delta.convert_to<double>();
    if (!ok(ch.big_n) && std::isfinite(est) && est < 1e12) {
      ch.big_n = std::max<std::uint64_t>(n_hyp, est > 2 ? static_cast<std::uint64_t>(est) - 2 : 0);
      while (!ok(ch.big_n)) ++ch.big_n;
    }
  }

  // Largest c found by bisection on [0, delta/2] meeting every c-constraint.
  Rational lo = 0, hi = delta / 2;
  ch.c = 0;
  for (int it = 0; it < 64 && delta > 0; ++it) {
    ch.c = (lo + hi) / 2;
    const auto cs = c_constraints(ch, x);
    if (std::all_of(cs.begin(), cs.end(), [](const Constraint& c) { return c.satisfied; }))
      lo = ch.c;
    else
      hi = ch.c;
  }
  ch.c = lo;
  ch.constraints = all_constraints(ch, x);
  return ch;
}

std::string chain_to_json(const ConstantChain& ch) {
  ojson j;
  j["p"] = fraction_string(ch.p);
  j["delta"] = fraction_string(ch.delta);
  j["N_hyp"] = ch.n_hyp;
  j["N"] = ch.big_n;
  j["tau"] = bracket_json(ch.tau);
  auto value = [](const Rational& q) {
    ojson v;
    v["exact"] = fraction_string(q);
    v["decimal"] = lower_decimal(q);
    return v;
  };
  j["mu"] = value(ch.mu);
  j["eps"] = value(ch.eps);
  j["t"] = ch.t;
  j["c"] = value(ch.c);
  j["feasible"] = ch.feasible();
  ojson cs = ojson::array();
  for (const auto& c : ch.constraints) {
    ojson e;
    e["name"] = c.name;
    e["statement"] = c.statement;
    e["lhs"] = bracket_json(c.lhs);
    e["rhs"] = bracket_json(c.rhs);
    e["slack_lower_bound"] = lower_decimal(c.slack());
    e["satisfied"] = c.satisfied;
    cs.push_back(std::move(e));
  }
  j["constraints"] = std::move(cs);
  return j.dump();
}

InductiveStepReport check_inductive_step(const ConstantChain& ch, const std::map<std::uint64_t, Rational>& f_vals,
                                         std::uint64_t n, unsigned bits) {
  if (n < ch.big_n) throw std::invalid_argument("check_inductive_step: n must be >= N");
  if (n < ch.t || n == 0) throw std::invalid_argument("check_inductive_step: n must be >= max(t, 1)");
  const std::uint64_t t = ch.t;
  const Bracket P = Bracket::exact(ch.p);
  const Bracket eps = Bracket::exact(ch.eps);
  const Bracket eps1 = Bracket::exact(1 + ch.eps);
  const Bracket tau_b = ch.tau;
  const Bracket r = sqrt_bracket(ch.p, bits);
  const Bracket ec = exp_bracket(ch.c, bits);
  const Bracket ect = exp_bracket(ch.c * Rational(t), bits);
  const Bracket one_minus_r = Bracket::exact(1) - r;
  const Bracket m1 = Bracket::exact(1 - 3 * ch.mu);
  const Bracket m2 = Bracket::exact(1 - 4 * ch.mu);
  const Bracket mu = Bracket::exact(ch.mu);
  auto x = [&](const Bracket& a, const Bracket& b) { return mul(a, b, bits); };
  auto d = [&](const Bracket& a, const Bracket& b) { return div(a, b, bits); };

  // a[s] = p^s e^{cs}, h[s] = p^{s/2}; g(m) = f(m) e^{cm} when f(m) is supplied.
  std::vector<Bracket> a(n + 1), h(n + 1);
  a[0] = h[0] = Bracket::exact(1);
  const Bracket pec = x(P, ec);
  for (std::uint64_t s = 1; s <= n; ++s) {
    a[s] = x(a[s - 1], pec);
    h[s] = x(h[s - 1], r);
  }
  auto g = [&](std::uint64_t m) -> std::optional<Bracket> {
    const auto it = f_vals.find(m);
    if (it == f_vals.end()) return std::nullopt;
    return x(Bracket::exact(it->second), exp_bracket(ch.c * Rational(m), bits));
  };
  auto g_or_one = [&](std::uint64_t m) { return g(m).value_or(Bracket::exact(1)); };

  const Bracket first = exp_bracket(-(ch.delta - ch.c) * Rational(n), bits);
  const Bracket edn = exp_bracket(-ch.delta * Rational(n) / 2, bits);
  const Bracket edN = exp_bracket(-ch.delta * Rational(ch.big_n) / 2, bits);

  Bracket v0 = first, v1 = first, v2 = edn, v3 = m1 + edN, d1 = Bracket::exact(0), d2 = edn - first;
  for (std::uint64_t s = 1; s <= n; ++s) {
    const Bracket& w = s <= t ? eps : eps1;
    v0 = v0 + x(w, x(a[s], g_or_one(n - s)));
    v1 = v1 + x(w, a[s]);
    v2 = v2 + x(w, h[s]);
    v3 = v3 + x(eps, h[s]);
    if (s > t) v3 = v3 + h[s];
    if (const auto gs = g(n - s)) d1 = d1 + x(w, x(a[s], Bracket::exact(1) - *gs));
    d2 = d2 + x(w, h[s] - a[s]);
  }
  const Bracket tau_term = x(x(eps1, tau_b), g_or_one(n - t));
  v0 = v0 + x(tau_term, ect);
  v1 = v1 + x(m2, ect);
  v2 = v2 + m1;
  d1 = d1 + x(ect, m2 - tau_term);
  d2 = d2 + (m1 - x(m2, ect));
  const Bracket d3 = n == ch.big_n ? Bracket::exact(0) : edN - edn;
  const Bracket rt = pow(r, t, bits), rn1 = pow(r, n + 1, bits);
  const Bracket v4 = m1 + edN + d(eps, one_minus_r) + d(rt, one_minus_r);
  const Bracket d4 = x(eps, d(one_minus_r + rn1, one_minus_r)) + (rt + d(rn1, one_minus_r));
  const Bracket d5 = (mu - edN) + (mu - d(eps, one_minus_r)) + (mu - d(rt, one_minus_r));

  InductiveStepReport rep;
  rep.n = n;
  const Bracket values[5] = {v0, v1, v2, v3, v4};
  const Bracket slacks[5] = {d1, d2, d3, d4, d5};
  const char* names[5] = {"f(n) exp(cn) bound", "induction hypothesis applied", "exp(c) < p^(-1/2) applied",
                          "n >= N and sums merged", "geometric sums closed"};
  for (int i = 0; i < 5; ++i) {
    rep.lines.push_back({names[i], values[i], slacks[i], slacks[i].lo >= 0});
    if (!rep.lines.back().holds && !rep.first_failure) rep.first_failure = static_cast<std::size_t>(i);
  }
  rep.overall_slack = d1 + d2 + d3 + d4 + d5;
  rep.alpha.assign(t + 1, Rational(0));
  rep.alpha[t] = ch.eps / 3;
  for (std::uint64_t s = t; s >= 1; --s) rep.alpha[s - 1] = rep.alpha[s] / (4 * Rational(s));
  return rep;
}

std::string step_to_json(const InductiveStepReport& r) {
  ojson j;
  j["n"] = r.n;
  j["holds"] = r.holds();
  j["first_failing_line"] = r.first_failure ? ojson(*r.first_failure) : ojson(nullptr);
  ojson lines = ojson::array();
  for (const auto& l : r.lines) {
    ojson e;
    e["name"] = l.name;
    e["value"] = bracket_json(l.value);
    e["slack_to_next"] = bracket_json(l.slack);
    e["holds"] = l.holds;
    lines.push_back(std::move(e));
  }
  j["lines"] = std::move(lines);
  j["overall_slack"] = bracket_json(r.overall_slack);
  ojson alpha = ojson::array();
  for (const auto& a : r.alpha) alpha.push_back(fraction_string(a));
  j["alpha"] = std::move(alpha);
  return j.dump();
}

}  // namespace permlab
