#include "permlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>
#include <json.hpp>

#include "permlab/parallel.hpp"
#include "permlab/permanent.hpp"
#include "permlab/philox.hpp"

namespace permlab {

namespace {


UInt128 mul_checked(UInt128 a, UInt128 b) {
  UInt128 out;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("spectrum: count weight exceeds 128 bits");
  return out;
}

// Matrices whose first `fixed_rows` rows are fixed and whose remaining rows
// are drawn independently from `candidates` (with integer weights).
struct RowModel {
  std::size_t n = 0;
  std::vector<Entry> fixed;  // fixed_rows x n
  std::size_t fixed_rows = 0;
  std::vector<std::vector<Entry>> candidates;
  std::vector<UInt128> weights;
  bool multiset_prefix = false;
  UInt128 class_multiplier = 1;
  bool add_negation = false;  // also credit -per with the same weight
};

using LocalCounts = std::map<Int128, UInt128>;

void credit(LocalCounts& counts, Int128 value, UInt128 weight) {
  UInt128& slot = counts[value];
  if (__builtin_add_overflow(slot, weight, &slot)) throw OverflowError("spectrum: count exceeds 128 bits");
}

UInt128 factorial(std::size_t k) {
  UInt128 f = 1;
  for (std::size_t i = 2; i <= k; ++i) f = mul_checked(f, i);
  return f;
}

// Iterates prefixes of `len` row indices in [0, m): every tuple, or only
// non-decreasing ones. Returns false when exhausted.
bool next_prefix(std::vector<std::size_t>& idx, std::size_t m, bool nondecreasing) {
  for (std::size_t pos = idx.size(); pos-- > 0;) {
    if (idx[pos] + 1 < m) {
      ++idx[pos];
      if (nondecreasing)
        for (std::size_t q = pos + 1; q < idx.size(); ++q) idx[q] = idx[pos];
      else
        for (std::size_t q = pos + 1; q < idx.size(); ++q) idx[q] = 0;
      return true;
    }
  }
  return false;
}

void enumerate_worker(const RowModel& model, std::size_t worker, std::size_t workers, LocalCounts& out) {
  const std::size_t n = model.n;
  const std::size_t random_rows = n - model.fixed_rows;
  if (random_rows == 0) {
    if (worker == 0) {
      const Int128 per = detail::ryser_dense(model.fixed.data(), n);
      credit(out, per, model.class_multiplier);
      if (model.add_negation) credit(out, -per, model.class_multiplier);
    }
    return;
  }
  const std::size_t m = model.candidates.size();
  const std::size_t prefix_len = random_rows - 1;
  const UInt128 prefix_factorial = factorial(prefix_len);
  std::vector<std::size_t> idx(prefix_len, 0);
  std::vector<Entry> block((n - 1) * n);
  std::copy(model.fixed.begin(), model.fixed.end(), block.begin());
  std::vector<Int128> minors(n);
  std::uint64_t ordinal = 0;
  do {
    if (ordinal++ % workers != worker) continue;
    UInt128 weight = model.class_multiplier;
    for (std::size_t r = 0; r < prefix_len; ++r) {
      const auto& row = model.candidates[idx[r]];
      std::copy(row.begin(), row.end(), block.begin() + static_cast<std::ptrdiff_t>((model.fixed_rows + r) * n));
      weight = mul_checked(weight, model.weights[idx[r]]);
    }
    if (model.multiset_prefix) {
      UInt128 denom = 1;
      for (std::size_t r = 0; r < prefix_len;) {
        std::size_t run = 1;
        while (r + run < prefix_len && idx[r + run] == idx[r]) ++run;
        denom = mul_checked(denom, factorial(run));
        r += run;
      }
      weight = mul_checked(weight, prefix_factorial / denom);
    }
    detail::column_deleted_minors(block.data(), n, minors.data());
    for (std::size_t c = 0; c < m; ++c) {
      const auto& last = model.candidates[c];
      Int128 per = 0;
      for (std::size_t j = 0; j < n; ++j) {
        Int128 term;
        if (!checked_mul(last[j], minors[j], term) || !checked_add(per, term, per))
          throw OverflowError("spectrum: permanent exceeds 128 bits");
      }
      const UInt128 w = mul_checked(weight, model.weights[c]);
      credit(out, per, w);
      if (model.add_negation) credit(out, -per, w);
    }
  } while (next_prefix(idx, m, model.multiset_prefix));
}

std::map<Int128, BigInt> enumerate(const RowModel& model, std::size_t workers) {
  workers = std::max<std::size_t>(workers, 1);
  std::vector<LocalCounts> partial(workers);
  run_workers(workers, [&](std::size_t w) { enumerate_worker(model, w, workers, partial[w]); });
  std::map<Int128, BigInt> merged;
  for (const auto& local : partial)
    for (const auto& [v, c] : local) merged[v] += to_bigint(c);
  return merged;
}

void all_rows(std::size_t len, const std::vector<Entry>& values, const std::vector<UInt128>& weights,
              std::vector<std::vector<Entry>>& rows, std::vector<UInt128>& row_weights) {
  std::vector<std::size_t> digit(len, 0);
  const std::size_t base = values.size();
  for (;;) {
    std::vector<Entry> row(len);
    UInt128 w = 1;
    for (std::size_t i = 0; i < len; ++i) {
      row[i] = values[digit[i]];
      w = mul_checked(w, weights[digit[i]]);
    }
    rows.push_back(std::move(row));
    row_weights.push_back(w);
    std::size_t pos = len;
    while (pos > 0 && ++digit[pos - 1] == base) digit[--pos] = 0;
    if (pos == 0) break;
  }
}

}  // namespace

Reduction parse_reduction(const std::string& name) {
  if (name == "none") return Reduction::none;
  if (name == "row-multiset" || name == "row_multiset") return Reduction::row_multiset;
  if (name == "full") return Reduction::full;
  throw ParseError("unknown reduction '" + name + "' (none|row-multiset|full)");
}

std::string to_string(Reduction r) {
  switch (r) {
    case Reduction::none: return "none";
    case Reduction::row_multiset: return "row-multiset";
    case Reduction::full: return "full";
  }
  return "?";
}

Rational Spectrum::probability(Int128 value) const {
  if (kind == SpectrumKind::exact) {
    auto it = counts.find(value);
    return it == counts.end() ? Rational(0) : Rational(it->second, total);
  }
  for (const auto& e : estimates)
    if (e.value == value) return e.estimate;
  throw std::out_of_range("Spectrum::probability: value was not a Monte Carlo target");
}

Spectrum exact_spectrum(std::size_t n, const FiniteDist& entry, const EnumerationOptions& opts) {
  if (n == 0) throw std::invalid_argument("exact_spectrum: n must be >= 1");
  BigInt common = 1;
  for (const auto& [v, p] : entry.atoms())
    common = boost::multiprecision::lcm(common, boost::multiprecision::denominator(p));
  if (common > BigInt(UINT64_MAX)) throw std::invalid_argument("exact_spectrum: probability denominator too large");
  std::vector<Entry> values;
  std::vector<UInt128> weights;
  for (const auto& [v, p] : entry.atoms()) {
    values.push_back(to_entry(v));
    weights.push_back(static_cast<std::uint64_t>(boost::multiprecision::numerator(p) *
                                                  (common / boost::multiprecision::denominator(p))));
  }
  const bool uniform = std::all_of(weights.begin(), weights.end(), [](UInt128 w) { return w == 1; });
  if (opts.reduction != Reduction::none && !uniform)
    throw std::invalid_argument("exact_spectrum: symmetry reductions require uniform entry probabilities");

  // Work = prefixes x last-row candidates; each unit costs one n-term dot product.
  {
    const std::size_t m = opts.reduction == Reduction::full ? (std::size_t{1} << (n - 1)) : std::size_t{0};
    const long double base = opts.reduction == Reduction::full ? static_cast<long double>(m)
                                                               : std::pow(static_cast<long double>(values.size()), n);
    const std::size_t prefix_len = opts.reduction == Reduction::full ? (n >= 2 ? n - 2 : 0) : n - 1;
    long double prefixes = 1;
    if (opts.reduction == Reduction::none) {
      prefixes = std::pow(base, prefix_len);
    } else {
      for (std::size_t i = 1; i <= prefix_len; ++i) prefixes = prefixes * (base + i - 1) / i;
    }
    if (prefixes * base > static_cast<long double>(opts.work_cap))
      throw CapExceededError("exact_spectrum: enumeration work ~" + std::to_string(static_cast<double>(prefixes * base)) +
                             " exceeds cap; choose a stronger reduction or smaller n");
  }

  RowModel model;
  model.n = n;
  if (opts.reduction == Reduction::full) {
    if (values.size() != 2 || values[0] != -values[1] || values[1] == 0)
      throw std::invalid_argument("exact_spectrum: full reduction needs support {-a, a}");
    const Entry a = values[1];
    model.fixed_rows = 1;
    model.fixed.assign(n, a);
    std::vector<std::vector<Entry>> tails;
    std::vector<UInt128> tail_w;
    if (n > 1) all_rows(n - 1, values, weights, tails, tail_w);
    for (auto& t : tails) {
      std::vector<Entry> row{a};
      row.insert(row.end(), t.begin(), t.end());
      model.candidates.push_back(std::move(row));
    }
    model.weights = std::move(tail_w);
    model.multiset_prefix = true;
    model.class_multiplier = static_cast<UInt128>(1) << (2 * n - 2);
    model.add_negation = true;
  } else {
    all_rows(n, values, weights, model.candidates, model.weights);
    model.multiset_prefix = opts.reduction == Reduction::row_multiset;
  }

  Spectrum s;
  s.n = n;
  s.kind = SpectrumKind::exact;
  s.total = pow_int(common, n * n);
  s.counts = enumerate(model, opts.workers);
  BigInt sum = 0;
  for (const auto& [v, c] : s.counts) sum += c;
  if (sum != s.total) throw std::logic_error("exact_spectrum: counts do not sum to total");
  return s;
}

std::pair<double, double> clopper_pearson(std::uint64_t hits, std::uint64_t trials, double confidence) {
  const double tail = (1.0 - confidence) / 2.0;
  const auto k = static_cast<double>(hits), n = static_cast<double>(trials);
  double lo = 0.0, hi = 1.0;
  if (hits > 0) lo = boost::math::quantile(boost::math::beta_distribution<double>(k, n - k + 1), tail);
  if (hits < trials) hi = boost::math::quantile(boost::math::beta_distribution<double>(k + 1, n - k), 1.0 - tail);
  return {lo, hi};
}

Spectrum mc_spectrum(std::size_t n, const FiniteDist& entry, const std::vector<Int128>& targets,
                     std::uint64_t samples, std::uint64_t seed, std::size_t workers) {
  if (samples == 0) throw std::invalid_argument("mc_spectrum: samples must be >= 1");
  if (n == 0 || n > kRyserMaxSide) throw std::invalid_argument("mc_spectrum: n out of range");
  workers = std::max<std::size_t>(workers, 1);
  const IntegerSampler sampler(entry);
  std::vector<std::vector<std::uint64_t>> hits(workers, std::vector<std::uint64_t>(targets.size(), 0));
  run_workers(workers, [&](std::size_t w) {
    std::vector<Entry> a(n * n);
    for (std::uint64_t i = w; i < samples; i += workers) {
      CounterRng rng(seed, i);
      for (auto& e : a) e = sampler(rng);
      const Int128 per = detail::ryser_dense(a.data(), n);
      for (std::size_t t = 0; t < targets.size(); ++t)
        if (per == targets[t]) ++hits[w][t];
    }
  });
  Spectrum s;
  s.n = n;
  s.kind = SpectrumKind::estimated;
  s.total = samples;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    TargetEstimate e;
    e.value = targets[t];
    for (std::size_t w = 0; w < workers; ++w) e.hits += hits[w][t];
    e.estimate = Rational(BigInt(e.hits), BigInt(samples));
    std::tie(e.ci_lo, e.ci_hi) = clopper_pearson(e.hits, samples);
    const double est = static_cast<double>(e.hits) / static_cast<double>(samples);
    e.half_width = std::max(est - e.ci_lo, e.ci_hi - est);
    s.estimates.push_back(e);
  }
  return s;
}

Rational q_max(const Spectrum& s) {
  if (s.kind == SpectrumKind::exact) {
    if (s.counts.empty()) throw std::invalid_argument("q_max: empty spectrum");
    BigInt best = 0;
    for (const auto& [v, c] : s.counts) best = std::max(best, c);
    return Rational(best, s.total);
  }
  if (s.estimates.empty()) throw std::invalid_argument("q_max: empty spectrum");
  Rational best = 0;
  for (const auto& e : s.estimates) best = std::max(best, e.estimate);
  return best;
}

namespace {
std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}
}  // namespace

std::string spectrum_to_json(const Spectrum& s) {
  nlohmann::ordered_json j;
  j["n"] = s.n;
  j["kind"] = s.kind == SpectrumKind::exact ? "exact" : "estimated";
  j["total"] = s.total.str();
  auto atoms = nlohmann::ordered_json::array();
  if (s.kind == SpectrumKind::exact) {
    for (const auto& [v, c] : s.counts)
      atoms.push_back({{"value", to_string(v)}, {"count", c.str()}, {"prob", fraction_string(s.probability(v))}});
    j["q_max"] = fraction_string(q_max(s));
  } else {
    for (const auto& e : s.estimates)
      atoms.push_back({{"value", to_string(e.value)},
                       {"hits", e.hits},
                       {"estimate", fraction_string(e.estimate)},
                       {"ci_lo", format_double(e.ci_lo)},
                       {"ci_hi", format_double(e.ci_hi)},
                       {"half_width", format_double(e.half_width)}});
  }
  j["atoms"] = std::move(atoms);
  return j.dump();
}

std::string spectrum_to_csv(const Spectrum& s) {
  std::string out;
  if (s.kind == SpectrumKind::exact) {
    out = "value,count,prob\n";
    for (const auto& [v, c] : s.counts) out += to_string(v) + "," + c.str() + "," + fraction_string(s.probability(v)) + "\n";
  } else {
    out = "value,hits,estimate,ci_lo,ci_hi\n";
    for (const auto& e : s.estimates)
      out += to_string(e.value) + "," + std::to_string(e.hits) + "," + fraction_string(e.estimate) + "," +
             format_double(e.ci_lo) + "," + format_double(e.ci_hi) + "\n";
  }
  return out;
}

}  // namespace permlab
