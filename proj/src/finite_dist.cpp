#include "permlab/finite_dist.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "permlab/philox.hpp"

namespace permlab {

FiniteDist::FiniteDist(AtomMap atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("FiniteDist: no atoms");
  Rational total = 0;
  for (const auto& [v, p] : atoms_) {
    if (p <= 0) throw std::invalid_argument("FiniteDist: non-positive probability at value " + value_string(v));
    total += p;
  }
  if (total != 1) throw std::invalid_argument("FiniteDist: probabilities sum to " + fraction_string(total));
}

FiniteDist::FiniteDist(std::initializer_list<std::pair<Rational, Rational>> atoms) {
  AtomMap m;
  for (const auto& [v, p] : atoms)
    if (!m.emplace(v, p).second) throw std::invalid_argument("FiniteDist: duplicate value " + value_string(v));
  *this = FiniteDist(std::move(m));
}

FiniteDist FiniteDist::point_mass(const Rational& v) { return FiniteDist(AtomMap{{v, Rational(1)}}); }

FiniteDist FiniteDist::rademacher() { return FiniteDist{{Rational(-1), Rational(1, 2)}, {Rational(1), Rational(1, 2)}}; }

FiniteDist FiniteDist::uniform(const std::vector<Rational>& values) {
  AtomMap m;
  const Rational p(1, static_cast<long>(values.size()));
  for (const auto& v : values)
    if (!m.emplace(v, p).second) throw std::invalid_argument("FiniteDist::uniform: duplicate value");
  return FiniteDist(std::move(m));
}

Rational FiniteDist::prob(const Rational& v) const {
  auto it = atoms_.find(v);
  return it == atoms_.end() ? Rational(0) : it->second;
}

FiniteDist FiniteDist::negate() const {
  AtomMap m;
  for (const auto& [v, p] : atoms_) m.emplace(-v, p);
  return FiniteDist(std::move(m), Unchecked{});
}

FiniteDist convolve(const FiniteDist& d1, const FiniteDist& d2, std::size_t atom_cap) {
  FiniteDist::AtomMap out;
  for (const auto& [v1, p1] : d1.atoms()) {
    for (const auto& [v2, p2] : d2.atoms()) {
      out[v1 + v2] += p1 * p2;
      if (out.size() > atom_cap)
        throw CapExceededError("convolve: result exceeds atom cap of " + std::to_string(atom_cap));
    }
  }
  return FiniteDist(std::move(out), FiniteDist::Unchecked{});
}

Rational max_point_prob(const FiniteDist& d) {
  Rational best = 0;
  for (const auto& [v, p] : d.atoms()) best = std::max(best, p);
  return best;
}

Rational collision_prob(const FiniteDist& d) {
  Rational s = 0;
  for (const auto& [v, p] : d.atoms()) s += p * p;
  return s;
}

FiniteDist symmetrize(const FiniteDist& d, std::size_t atom_cap) { return convolve(d, d.negate(), atom_cap); }

FiniteDist convolve_all(const std::vector<FiniteDist>& ds, std::size_t atom_cap) {
  FiniteDist acc = FiniteDist::point_mass(0);
  for (const auto& d : ds) acc = convolve(acc, d, atom_cap);
  return acc;
}

ThinningSpec::ThinningSpec(std::size_t k_, std::vector<FiniteDist> dists_)
    : n(dists_.size()), k(k_), dists(std::move(dists_)) {
  if (k < 1 || k > n) throw std::invalid_argument("ThinningSpec: require 1 <= k <= n");
}

namespace {

Rational zero_atom_of_sum(const FiniteDist& a, const FiniteDist& b) {
  Rational s = 0;
  for (const auto& [v, p] : a.atoms()) s += p * b.prob(-v);
  return s;
}

struct Group {
  FiniteDist sym;
  std::size_t size = 0;
  std::vector<FiniteDist> powers;  // powers[c] = sym convolved c times
};

struct StarSearch {
  std::vector<Group>& groups;
  std::size_t atom_cap;
  Rational weighted_sum = 0;

  void run(std::size_t g, std::size_t remaining, const FiniteDist& acc, const BigInt& multiplicity) {
    if (remaining == 0) {
      weighted_sum += Rational(multiplicity) * acc.prob(0);
      return;
    }
    if (g == groups.size()) return;
    std::size_t after = 0;
    for (std::size_t h = g + 1; h < groups.size(); ++h) after += groups[h].size;
    Group& grp = groups[g];
    const std::size_t lo = remaining > after ? remaining - after : 0;
    const std::size_t hi = std::min(grp.size, remaining);
    for (std::size_t c = lo; c <= hi; ++c) {
      while (grp.powers.size() <= c) grp.powers.push_back(convolve(grp.powers.back(), grp.sym, atom_cap));
      const BigInt mult = multiplicity * binomial(grp.size, c);
      if (c == remaining) {
        weighted_sum += Rational(mult) * zero_atom_of_sum(acc, grp.powers[c]);
      } else {
        run(g + 1, remaining - c, c == 0 ? acc : convolve(acc, grp.powers[c], atom_cap), mult);
      }
    }
  }
};

}  // namespace

Rational star_zero_prob(const ThinningSpec& spec, std::uint64_t subset_cap, std::size_t atom_cap) {
  if (spec.k < 1 || spec.k > spec.n || spec.dists.size() != spec.n)
    throw std::invalid_argument("star_zero_prob: malformed ThinningSpec");
  const BigInt subsets = binomial(spec.n, spec.k);
  if (subsets > BigInt(subset_cap))
    throw CapExceededError("star_zero_prob: C(" + std::to_string(spec.n) + "," + std::to_string(spec.k) +
                           ") = " + subsets.str() + " exceeds subset cap " + std::to_string(subset_cap));
  std::vector<Group> groups;
  std::vector<const FiniteDist*> reps;
  for (const auto& d : spec.dists) {
    auto it = std::find_if(reps.begin(), reps.end(), [&](const FiniteDist* r) { return *r == d; });
    if (it != reps.end()) {
      ++groups[static_cast<std::size_t>(it - reps.begin())].size;
    } else {
      reps.push_back(&d);
      FiniteDist sym = symmetrize(d, atom_cap);
      groups.push_back({sym, 1, {FiniteDist::point_mass(0), sym}});
    }
  }
  StarSearch search{groups, atom_cap};
  search.run(0, spec.k, FiniteDist::point_mass(0), BigInt(1));
  return search.weighted_sum / Rational(subsets);
}

Rational hypergeometric_empty_prob(std::uint64_t n, std::uint64_t k, std::uint64_t isize) {
  if (k > n || isize > n) throw std::invalid_argument("hypergeometric_empty_prob: require k, isize <= n");
  return Rational(binomial(n - isize, k), binomial(n, k));
}

ColumnSet sample_subset(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k > n) throw std::invalid_argument("sample_subset: k > n");
  CounterRng rng(seed, 0);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{1});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return ColumnSet(n, std::move(idx));
}

Entry to_entry(const Rational& v) {
  if (!is_integer(v)) throw std::invalid_argument("value " + value_string(v) + " is not an integer");
  const BigInt& num = boost::multiprecision::numerator(v);
  if (num > BigInt(INT64_MAX) || num < -BigInt(INT64_MAX)) throw OverflowError("entry value exceeds 64 bits");
  return static_cast<Entry>(num);
}

IntegerSampler::IntegerSampler(const FiniteDist& d) {
  BigInt common = 1;
  for (const auto& [v, p] : d.atoms()) common = boost::multiprecision::lcm(common, boost::multiprecision::denominator(p));
  if (common > BigInt(UINT64_MAX)) throw std::invalid_argument("IntegerSampler: probability denominator exceeds 64 bits");
  denominator_ = static_cast<std::uint64_t>(common);
  std::uint64_t acc = 0;
  for (const auto& [v, p] : d.atoms()) {
    values_.push_back(to_entry(v));
    acc += static_cast<std::uint64_t>(boost::multiprecision::numerator(p) * (common / boost::multiprecision::denominator(p)));
    cumulative_.push_back(acc);
  }
}

FiniteDist read_dist(std::istream& in) {
  FiniteDist::AtomMap m;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string v, p, extra;
    if (!(ls >> v)) continue;
    if (!(ls >> p) || (ls >> extra)) throw ParseError("distribution: expected 'value probability' in line '" + line + "'");
    if (!m.emplace(parse_rational(v), parse_rational(p)).second) throw ParseError("distribution: duplicate value " + v);
  }
  try {
    return FiniteDist(std::move(m));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

void write_dist(std::ostream& out, const FiniteDist& d) {
  for (const auto& [v, p] : d.atoms()) out << value_string(v) << ' ' << fraction_string(p) << '\n';
}

std::string dist_to_json(const FiniteDist& d) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [v, p] : d.atoms()) arr.push_back({{"v", value_string(v)}, {"p", fraction_string(p)}});
  return arr.dump();
}

FiniteDist dist_from_json(const std::string& text) {
  FiniteDist::AtomMap m;
  try {
    const auto arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw ParseError("distribution JSON: expected array");
    for (const auto& atom : arr) {
      if (!m.emplace(parse_rational(atom.at("v").get<std::string>()), parse_rational(atom.at("p").get<std::string>()))
               .second)
        throw ParseError("distribution JSON: duplicate value");
    }
    return FiniteDist(std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("distribution JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace permlab
