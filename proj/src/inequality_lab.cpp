#include "permlab/inequality_lab.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "permlab/parallel.hpp"

namespace permlab {

namespace {

using ojson = nlohmann::ordered_json;

constexpr unsigned kConstantBits = 64;

ojson dist_json(const FiniteDist& d) { return ojson::parse(dist_to_json(d)); }

ojson dists_json(const std::vector<FiniteDist>& ds) {
  ojson a = ojson::array();
  for (const auto& d : ds) a.push_back(dist_json(d));
  return a;
}

void set_measured(InequalityReport& r, const Rational& constant_squared) {
  r.outcome = Outcome::measured;
  r.constant_squared = constant_squared;
  r.constant = sqrt_bracket(constant_squared, kConstantBits);
}

void require_p(const Rational& p) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must lie in (0, 1)");
}

// Runs make(i) for i < instances on `workers` threads; results are indexed by i.
std::vector<InequalityReport> run_battery(const BatteryConfig& cfg,
                                          const std::function<InequalityReport(std::uint64_t)>& make) {
  std::vector<InequalityReport> out(cfg.instances);
  const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
  run_workers(workers, [&](std::size_t w) {
    for (std::uint64_t i = w; i < cfg.instances; i += workers) out[i] = make(i);
  });
  return out;
}

// Folds exact instance reports into one: fails if any instance fails,
// otherwise reports the instance with the largest tightness.
InequalityReport summarize_exact(const std::string& name, const BatteryConfig& cfg,
                                 const std::vector<InequalityReport>& rs,
                                 const std::function<Rational(const InequalityReport&)>& tightness) {
  InequalityReport out;
  out.name = name;
  std::uint64_t failures = 0, skipped = 0;
  std::optional<std::size_t> pick, first_fail;
  Rational best = -1;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (rs[i].outcome == Outcome::precondition_failed) {
      ++skipped;
      continue;
    }
    if (rs[i].outcome == Outcome::fails) {
      if (!failures) first_fail = i;
      ++failures;
      continue;
    }
    const Rational t = tightness(rs[i]);
    if (!pick || t > best) {
      best = t;
      pick = i;
    }
  }
  const std::optional<std::size_t> shown = first_fail ? first_fail : pick;
  out.outcome = failures ? Outcome::fails : Outcome::holds;
  if (shown) {
    out.lhs = rs[*shown].lhs;
    out.rhs = rs[*shown].rhs;
  }
  if (pick) out.extra.emplace_back("max_tightness", fraction_string(best));
  ojson w;
  w["battery"] = name;
  w["instances"] = cfg.instances;
  w["seed"] = cfg.seed;
  w["failures"] = failures;
  w["skipped"] = skipped;
  if (shown) {
    w[first_fail ? "first_failure" : "tightest"] = *shown;
    w["instance"] = ojson::parse(rs[*shown].witness);
  }
  out.witness = w.dump();
  return out;
}

InequalityReport summarize_measured(const std::string& name, const ojson& header,
                                    const std::vector<InequalityReport>& rs) {
  InequalityReport out;
  out.name = name;
  std::optional<std::size_t> pick;
  std::uint64_t skipped = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (rs[i].outcome != Outcome::measured) {
      ++skipped;
      continue;
    }
    if (!pick || *rs[i].constant_squared > *rs[*pick].constant_squared) pick = i;
  }
  ojson w = header;
  w["skipped"] = skipped;
  if (pick) {
    set_measured(out, *rs[*pick].constant_squared);
    out.lhs = rs[*pick].lhs;
    out.extra = rs[*pick].extra;
    w["sup_at"] = *pick;
    w["instance"] = ojson::parse(rs[*pick].witness);
  } else {
    out.outcome = Outcome::precondition_failed;
    out.note = "no instance satisfied the preconditions";
  }
  out.witness = w.dump();
  return out;
}

Rational ratio(const InequalityReport& r) { return *r.rhs == 0 ? Rational(0) : Rational(r.lhs / *r.rhs); }

}  // namespace

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::holds: return "holds";
    case Outcome::fails: return "fails";
    case Outcome::measured: return "measured";
    case Outcome::precondition_failed: return "precondition_failed";
  }
  return "?";
}

std::string report_to_json(const InequalityReport& r) {
  ojson j;
  j["name"] = r.name;
  j["outcome"] = to_string(r.outcome);
  j["holds"] = r.ok();
  j["lhs"] = fraction_string(r.lhs);
  if (r.rhs) j["rhs"] = fraction_string(*r.rhs);
  if (r.constant_squared) j["constant_squared"] = fraction_string(*r.constant_squared);
  if (r.constant) {
    j["constant_lo"] = decimal_string(r.constant->lo, 12);
    // Flooring hi + 10^-12 gives a 12-digit upper bound.
    j["constant_hi"] = decimal_string(r.constant->hi + Rational(1, BigInt(1000000) * 1000000), 12);
  }
  for (const auto& [k, v] : r.extra) j[k] = v;
  if (!r.note.empty()) j["note"] = r.note;
  j["witness"] = r.witness.empty() ? ojson(nullptr) : ojson::parse(r.witness);
  return j.dump();
}

InequalityReport check_monotonicity(const FiniteDist& dx, const FiniteDist& dy) {
  InequalityReport r;
  r.name = "monotonicity";
  r.lhs = max_point_prob(convolve(dx, dy));
  r.rhs = max_point_prob(dx);
  r.outcome = r.lhs <= *r.rhs ? Outcome::holds : Outcome::fails;
  ojson w;
  w["X"] = dist_json(dx);
  w["Y"] = dist_json(dy);
  r.witness = w.dump();
  return r;
}

InequalityReport check_duplication(const FiniteDist& d1, const FiniteDist& d2) {
  InequalityReport r;
  r.name = "duplication";
  const Rational q = max_point_prob(convolve(d1, d2));
  r.lhs = q * q;
  r.rhs = collision_prob(d1) * collision_prob(d2);
  r.outcome = r.lhs <= *r.rhs ? Outcome::holds : Outcome::fails;
  ojson w;
  w["X1"] = dist_json(d1);
  w["X2"] = dist_json(d2);
  r.witness = w.dump();
  return r;
}

InequalityReport kesten_ratio(const std::vector<FiniteDist>& dists, const Rational& p) {
  require_p(p);
  if (dists.empty()) throw std::invalid_argument("kesten_ratio: need at least one summand");
  for (const auto& d : dists)
    if (max_point_prob(d) > p) throw std::invalid_argument("kesten_ratio: some summand has Q > p");
  InequalityReport r;
  r.name = "kesten";
  r.lhs = max_point_prob(convolve_all(dists));
  const Rational m(static_cast<long long>(dists.size()));
  // Q / (p / sqrt((1-p) m)), squared.
  set_measured(r, r.lhs * r.lhs * (1 - p) * m / (p * p));
  r.extra.emplace_back("p", fraction_string(p));
  r.extra.emplace_back("m", std::to_string(dists.size()));
  ojson w;
  w["p"] = fraction_string(p);
  w["dists"] = dists_json(dists);
  r.witness = w.dump();
  return r;
}

InequalityReport check_relative_halasz(const ThinningSpec& spec) {
  InequalityReport r;
  r.name = "relative_halasz";
  ojson w;
  w["n"] = spec.n;
  w["k"] = spec.k;
  w["dists"] = dists_json(spec.dists);
  r.witness = w.dump();
  const Rational n(static_cast<long long>(spec.n)), k(static_cast<long long>(spec.k));
  if (spec.k == 0 || !(k < n / 4)) {
    r.outcome = Outcome::precondition_failed;
    r.note = "requires 1 <= k < n/4";
    return r;
  }
  const Rational big_p = star_zero_prob(spec);
  r.extra.emplace_back("star_zero_prob", fraction_string(big_p));
  if (!(big_p < 1 - 4 * k / n)) {
    r.outcome = Outcome::precondition_failed;
    r.note = "requires Pr[X_K^* = 0] < 1 - 4k/n";
    return r;
  }
  r.lhs = max_point_prob(convolve_all(spec.dists));
  // Q / (sqrt(k/n) P/(1-P)), squared.
  set_measured(r, r.lhs * r.lhs * n * (1 - big_p) * (1 - big_p) / (k * big_p * big_p));
  return r;
}

InequalityReport check_relative_assumption(const ThinningSpec& spec, const Rational& gamma, const Rational& p) {
  require_p(p);
  if (gamma <= 0 || gamma > 1) throw std::invalid_argument("gamma must lie in (0, 1]");
  InequalityReport r;
  r.name = "relative_assumption";
  ojson w;
  w["n"] = spec.n;
  w["k"] = spec.k;
  w["gamma"] = fraction_string(gamma);
  w["p"] = fraction_string(p);
  w["dists"] = dists_json(spec.dists);
  r.witness = w.dump();
  const Rational n(static_cast<long long>(spec.n)), k(static_cast<long long>(spec.k));
  std::size_t good = 0;
  for (const auto& d : spec.dists) good += max_point_prob(d) <= p;
  r.extra.emplace_back("good_summands", std::to_string(good));
  if (!(2 / gamma <= k) || !(k < (1 - p) * n / 8) || Rational(static_cast<long long>(good)) < gamma * n) {
    r.outcome = Outcome::precondition_failed;
    r.note = "requires 2/gamma <= k < (1-p)n/8 and Q[X_i] <= p for at least gamma*n summands";
    return r;
  }
  r.lhs = star_zero_prob(spec);
  r.rhs = (1 + p) / 2;
  const Rational cap = 1 - 4 * k / n;
  r.extra.emplace_back("one_minus_4k_over_n", fraction_string(cap));
  r.outcome = r.lhs <= *r.rhs && *r.rhs < cap ? Outcome::holds : Outcome::fails;
  return r;
}

SetFamily::SetFamily(std::size_t n_, std::size_t s_, std::vector<std::uint64_t> members_)
    : n(n_), s(s_), members(std::move(members_)) {
  if (n == 0 || n > 63) throw std::invalid_argument("SetFamily: n must lie in [1, 63]");
  if (s == 0 || s > n) throw std::invalid_argument("SetFamily: s must lie in [1, n]");
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end())
    throw std::invalid_argument("SetFamily: duplicate member");
  for (auto m : members)
    if (static_cast<std::size_t>(__builtin_popcountll(m)) != s || (m >> n) != 0)
      throw std::invalid_argument("SetFamily: member is not an s-subset of {1..n}");
}

std::uint64_t SetFamily::mask(const std::vector<std::size_t>& elements) {
  std::uint64_t m = 0;
  for (auto e : elements) {
    if (e == 0 || e > 63) throw std::invalid_argument("SetFamily::mask: element out of range");
    m |= std::uint64_t{1} << (e - 1);
  }
  return m;
}

HeavyPairs heavy_pairs(const SetFamily& family, const Rational& alpha) {
  if (alpha <= 0 || alpha > 1) throw std::invalid_argument("heavy_pairs: alpha must lie in (0, 1]");
  const BigInt total = binomial(family.n, family.s);
  const Rational size(static_cast<long long>(family.members.size()));
  if (size < alpha * Rational(total)) throw std::invalid_argument("heavy_pairs: |F| < alpha C(n,s)");
  HeavyPairs out;
  out.degree_threshold = alpha / 2 * Rational(static_cast<long long>(family.n - family.s + 1));
  out.size_guarantee = alpha / 2 * Rational(static_cast<long long>(family.s)) * Rational(total);
  std::map<std::uint64_t, long long> degree;
  for (auto f : family.members)
    for (auto rest = f; rest; rest &= rest - 1) ++degree[f & ~(rest & -rest)];
  for (auto f : family.members)
    for (auto rest = f; rest; rest &= rest - 1) {
      const std::uint64_t g = f & ~(rest & -rest);
      if (Rational(degree[g]) > out.degree_threshold) out.pairs.emplace_back(f, g);
    }
  if (Rational(static_cast<long long>(out.pairs.size())) < out.size_guarantee)
    throw std::logic_error("heavy_pairs: size guarantee violated");
  return out;
}

FiniteDist random_dist(CounterRng& rng, int max_support, int value_range) {
  const int width = 2 * value_range + 1;
  const int size = 1 + static_cast<int>(rng.uniform(static_cast<std::uint64_t>(std::min(max_support, width))));
  std::set<int> values;
  while (static_cast<int>(values.size()) < size)
    values.insert(static_cast<int>(rng.uniform(static_cast<std::uint64_t>(width))) - value_range);
  std::vector<long long> weights;
  long long sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    weights.push_back(1 + static_cast<long long>(rng.uniform(6)));
    sum += weights.back();
  }
  FiniteDist::AtomMap atoms;
  std::size_t i = 0;
  for (int v : values) atoms.emplace(Rational(v), Rational(weights[i++], sum));
  return FiniteDist(std::move(atoms));
}

InequalityReport monotonicity_battery(const BatteryConfig& cfg) {
  const auto rs = run_battery(cfg, [&](std::uint64_t i) {
    CounterRng rng(cfg.seed, i);
    const FiniteDist x = random_dist(rng), y = random_dist(rng);
    return check_monotonicity(x, y);
  });
  return summarize_exact("monotonicity_battery", cfg, rs, ratio);
}

InequalityReport duplication_battery(const BatteryConfig& cfg) {
  const auto rs = run_battery(cfg, [&](std::uint64_t i) {
    CounterRng rng(cfg.seed, i);
    const FiniteDist x = random_dist(rng), y = random_dist(rng);
    return check_duplication(x, y);
  });
  return summarize_exact("duplication_battery", cfg, rs, ratio);
}

InequalityReport kesten_rademacher_battery(std::size_t m_min, std::size_t m_max) {
  if (m_min == 0 || m_min > m_max) throw std::invalid_argument("kesten battery: need 1 <= m_min <= m_max");
  std::vector<InequalityReport> rs;
  for (std::size_t m = m_min; m <= m_max; ++m)
    rs.push_back(kesten_ratio(std::vector<FiniteDist>(m, FiniteDist::rademacher()), Rational(1, 2)));
  ojson h;
  h["battery"] = "kesten_rademacher";
  h["m_min"] = m_min;
  h["m_max"] = m_max;
  return summarize_measured("kesten_battery", h, rs);
}

InequalityReport halasz_battery(const BatteryConfig& cfg, std::size_t max_n) {
  if (max_n < 5) throw std::invalid_argument("halasz battery: max_n must be >= 5");
  const auto rs = run_battery(cfg, [&](std::uint64_t i) {
    CounterRng rng(cfg.seed, i);
    const std::size_t n = 5 + rng.uniform(max_n - 4);
    const std::size_t kmax = (n - 1) / 4;  // largest k with 4k < n
    const std::size_t k = 1 + rng.uniform(kmax);
    const FiniteDist pool[2] = {random_dist(rng), random_dist(rng)};
    std::vector<FiniteDist> ds;
    for (std::size_t j = 0; j < n; ++j) ds.push_back(pool[rng.uniform(2)]);
    return check_relative_halasz(ThinningSpec(k, std::move(ds)));
  });
  ojson h;
  h["battery"] = "relative_halasz";
  h["instances"] = cfg.instances;
  h["seed"] = cfg.seed;
  h["max_n"] = max_n;
  return summarize_measured("halasz_battery", h, rs);
}

InequalityReport assumption_battery(const BatteryConfig& cfg) {
  const auto rs = run_battery(cfg, [&](std::uint64_t i) {
    CounterRng rng(cfg.seed, i);
    const Rational p(1, static_cast<long long>(2 + rng.uniform(3)));
    const std::size_t k = 2 + rng.uniform(2);
    const Rational gamma = rng.uniform(2) ? Rational(1) : Rational(2, static_cast<long long>(k));
    // Smallest n with k < (1-p)n/8, plus slack.
    const Rational bound = 8 * Rational(static_cast<long long>(k)) / (1 - p);
    const std::size_t n = static_cast<std::size_t>(floor_div(boost::multiprecision::numerator(bound), boost::multiprecision::denominator(bound))) + 1 +
                          rng.uniform(6);
    const Rational need = gamma * Rational(static_cast<long long>(n));
    const std::size_t min_good = static_cast<std::size_t>(
        -floor_div(-boost::multiprecision::numerator(need), boost::multiprecision::denominator(need)));
    const std::size_t good = min_good + rng.uniform(n - min_good + 1);
    const auto inv_p = static_cast<int>(boost::multiprecision::denominator(p));
    std::vector<FiniteDist> good_pool, other_pool;
    for (int g = 0; g < 2; ++g) {
      const int m = inv_p + static_cast<int>(rng.uniform(3));
      std::set<int> vals;
      while (static_cast<int>(vals.size()) < m) vals.insert(static_cast<int>(rng.uniform(13)) - 6);
      good_pool.push_back(FiniteDist::uniform(std::vector<Rational>(vals.begin(), vals.end())));
      other_pool.push_back(random_dist(rng));
    }
    std::vector<FiniteDist> ds;
    for (std::size_t j = 0; j < n; ++j) ds.push_back(j < good ? good_pool[rng.uniform(2)] : other_pool[rng.uniform(2)]);
    return check_relative_assumption(ThinningSpec(k, std::move(ds)), gamma, p);
  });
  auto out = summarize_exact("assumption_battery", cfg, rs, ratio);
  // The generator only emits precondition-satisfying instances.
  for (const auto& r : rs)
    if (r.outcome == Outcome::precondition_failed) throw std::logic_error("assumption battery produced an invalid instance");
  return out;
}

InequalityReport heavy_pairs_battery(const BatteryConfig& cfg) {
  const auto rs = run_battery(cfg, [&](std::uint64_t i) {
    CounterRng rng(cfg.seed, i);
    const std::size_t n = 3 + rng.uniform(8);
    const std::size_t s = 1 + rng.uniform(n);
    const Rational alpha(static_cast<long long>(1 + rng.uniform(10)), 10);
    std::vector<std::uint64_t> all;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
      if (static_cast<std::size_t>(__builtin_popcountll(m)) == s) all.push_back(m);
    // Partial Fisher-Yates to a random size >= ceil(alpha |all|).
    const Rational need = alpha * Rational(static_cast<long long>(all.size()));
    const auto min_size = static_cast<std::size_t>(
        -floor_div(-boost::multiprecision::numerator(need), boost::multiprecision::denominator(need)));
    const std::size_t size = min_size + rng.uniform(all.size() - min_size + 1);
    for (std::size_t j = 0; j < size; ++j) std::swap(all[j], all[j + rng.uniform(all.size() - j)]);
    all.resize(size);
    const SetFamily fam(n, s, all);
    InequalityReport r;
    r.name = "heavy_pairs";
    ojson w;
    w["n"] = n;
    w["s"] = s;
    w["alpha"] = fraction_string(alpha);
    w["members"] = fam.members;
    r.witness = w.dump();
    try {
      const HeavyPairs h = heavy_pairs(fam, alpha);
      r.lhs = Rational(static_cast<long long>(h.pairs.size()));
      r.rhs = h.size_guarantee;
      r.outcome = Outcome::holds;
    } catch (const std::logic_error&) {
      r.outcome = Outcome::fails;
    }
    return r;
  });
  // Tightness for a lower bound: guarantee / |H|.
  return summarize_exact("heavy_pairs_battery", cfg, rs,
                         [](const InequalityReport& r) { return r.lhs == 0 ? Rational(0) : Rational(*r.rhs / r.lhs); });
}

}  // namespace permlab
