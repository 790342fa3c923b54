#include "permlab/structured.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "permlab/constants.hpp"
#include "permlab/parallel.hpp"
#include "permlab/permanent.hpp"
#include "permlab/philox.hpp"

namespace permlab {

namespace {

using ojson = nlohmann::ordered_json;

// Calls fn(members) for every size-k subset of {1..n} in lexicographic order.
void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i + 1;
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

struct Cell {
  std::vector<Entry> values;
  std::vector<Rational> probs;
};

// Odometer over the random rows [first, last) of the spec, writing each
// outcome into `a` (rows offset by T) and passing its probability.
class RowEnumerator {
 public:
  RowEnumerator(const StructuredMatrixSpec& spec, std::size_t first, std::size_t last, std::uint64_t cap)
      : spec_(spec), first_(first) {
    BigInt outcomes = 1;
    for (std::size_t r = first; r < last; ++r)
      for (std::size_t c = 0; c < spec.side(); ++c) {
        Cell cell;
        for (const auto& [v, q] : spec.dist(r, c).atoms()) {
          cell.values.push_back(to_entry(v));
          cell.probs.push_back(q);
        }
        outcomes *= cell.values.size();
        cells_.push_back(std::move(cell));
      }
    if (outcomes > cap)
      throw CapExceededError("conditional space has " + outcomes.str() + " outcomes, cap is " + std::to_string(cap));
  }

  void run(IntMatrix& a, const std::function<void(const Rational&)>& fn) const {
    const std::size_t side = spec_.side();
    const std::size_t base = spec_.T() + first_;
    std::vector<std::size_t> digit(cells_.size(), 0);
    for (;;) {
      Rational prob = 1;
      for (std::size_t i = 0; i < cells_.size(); ++i) {
        a(base + i / side, i % side) = cells_[i].values[digit[i]];
        prob *= cells_[i].probs[digit[i]];
      }
      fn(prob);
      std::size_t i = 0;
      while (i < digit.size() && ++digit[i] == cells_[i].values.size()) digit[i++] = 0;
      if (i == digit.size()) return;
    }
  }

 private:
  const StructuredMatrixSpec& spec_;
  std::size_t first_;
  std::vector<Cell> cells_;
};

IntMatrix blank_with_fixed(const StructuredMatrixSpec& spec) {
  IntMatrix a(spec.side(), spec.side(), 0);
  for (std::size_t r = 0; r < spec.T(); ++r)
    for (std::size_t c = 0; c < spec.side(); ++c) a(r, c) = spec.fixed()(r, c);
  return a;
}

void check_s(const StructuredMatrixSpec& spec, std::size_t s, bool allow_zero) {
  if (s > spec.n() || (s == 0 && !allow_zero))
    throw std::out_of_range("s=" + std::to_string(s) + " outside " + (allow_zero ? "0" : "1") + ".." +
                            std::to_string(spec.n()));
}

std::uint64_t subset_count(std::size_t n, std::size_t s) {
  const BigInt c = binomial(n, s);
  if (c > kDefaultSubsetCap) throw CapExceededError("C(n,s) = " + c.str() + " exceeds the subset cap");
  return static_cast<std::uint64_t>(c);
}

ojson matrix_json(const IntMatrix& a, std::size_t rows) {
  ojson m = ojson::array();
  for (std::size_t r = 0; r < rows; ++r) {
    ojson row = ojson::array();
    for (std::size_t c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    m.push_back(std::move(row));
  }
  return m;
}

std::vector<StructuredMatrixSpec> binary_family(std::size_t max_n, std::size_t max_T);

// Runs `checks(spec)` for every spec of the family, worker w taking specs
// w, w+workers, ...; the fold is in spec order.
InequalityReport run_family(const std::string& name, std::size_t max_n, std::size_t max_T, std::size_t workers,
                            const std::function<std::vector<InequalityReport>(const StructuredMatrixSpec&)>& checks) {
  const auto specs = binary_family(max_n, max_T);
  std::vector<std::vector<InequalityReport>> results(specs.size());
  workers = std::max<std::size_t>(1, workers);
  run_workers(workers, [&](std::size_t w) {
    for (std::size_t i = w; i < specs.size(); i += workers) results[i] = checks(specs[i]);
  });
  InequalityReport out;
  out.name = name;
  std::uint64_t total = 0, failures = 0;
  const InequalityReport* shown = nullptr;
  Rational best = -1;
  for (const auto& rs : results)
    for (const auto& r : rs) {
      ++total;
      if (r.outcome == Outcome::fails) {
        if (!failures) shown = &r;
        ++failures;
        continue;
      }
      if (failures || *r.rhs == 0) continue;
      const Rational ratio = r.lhs / *r.rhs;
      if (ratio > best) {
        best = ratio;
        shown = &r;
      }
    }
  out.outcome = failures ? Outcome::fails : Outcome::holds;
  ojson w;
  w["family"] = name;
  w["max_n"] = max_n;
  w["max_T"] = max_T;
  w["specs"] = specs.size();
  w["checks"] = total;
  w["failures"] = failures;
  if (shown) {
    out.lhs = shown->lhs;
    out.rhs = shown->rhs;
    w[failures ? "first_failure" : "tightest"] = ojson::parse(shown->witness);
  }
  out.witness = w.dump();
  return out;
}

std::vector<StructuredMatrixSpec> binary_family(std::size_t max_n, std::size_t max_T) {
  const Rational half(1, 2);
  const std::vector<FiniteDist> supports = {FiniteDist::uniform({-1, 1}), FiniteDist::uniform({0, 1}),
                                            FiniteDist::uniform({1, 2})};
  std::vector<StructuredMatrixSpec> out;
  for (std::size_t n = 1; n <= max_n; ++n)
    for (std::size_t T = 0; T <= max_T; ++T) {
      const std::size_t w = n + T;
      std::vector<std::vector<FiniteDist>> grids;
      for (const auto& d : supports) grids.emplace_back(n * w, d);
      std::vector<FiniteDist> mixed;
      for (std::size_t i = 0; i < n * w; ++i) mixed.push_back(supports[(i / w + i % w) % 3]);
      grids.push_back(std::move(mixed));

      std::vector<IntMatrix> fixed_blocks;
      if (T == 0) {
        fixed_blocks.emplace_back(0, w);
      } else {
        // All T x w blocks over {-1,0,1}; those without a nonzero T x T minor are skipped.
        const std::size_t cells = T * w;
        std::size_t count = 1;
        for (std::size_t i = 0; i < cells; ++i) count *= 3;
        for (std::size_t code = 0; code < count; ++code) {
          IntMatrix f(T, w);
          std::size_t x = code;
          for (std::size_t i = 0; i < cells; ++i, x /= 3) f(i / w, i % w) = static_cast<Entry>(x % 3) - 1;
          fixed_blocks.push_back(std::move(f));
        }
      }
      for (const auto& f : fixed_blocks)
        for (const auto& g : grids) {
          try {
            out.emplace_back(T, n, f, g, half);
          } catch (const std::invalid_argument&) {
          }
        }
    }
  return out;
}

}  // namespace

InequalityReport easy_bound_family(std::size_t max_n, std::size_t max_T, std::size_t workers) {
  return run_family("easy_bound_family", max_n, max_T, workers, [](const StructuredMatrixSpec& spec) {
    std::vector<InequalityReport> rs;
    for (std::size_t s = 1; s <= spec.n(); ++s)
      for (int z = -2; z <= 2; ++z) rs.push_back(check_easy_bound(spec, s, z));
    return rs;
  });
}

InequalityReport markov_family(std::size_t max_n, std::size_t max_T, std::size_t workers) {
  return run_family("markov_family", max_n, max_T, workers, [](const StructuredMatrixSpec& spec) {
    std::vector<InequalityReport> rs;
    for (std::size_t s = 1; s <= spec.n(); ++s)
      for (const Rational& alpha : {Rational(0), Rational(1, 4), Rational(1, 3)}) {
        rs.push_back(check_markov_bound(spec, s, alpha));
        rs.push_back(check_markov_bound(spec, s, alpha, easy_fp_bound(spec.p(), spec.n() - s)));
      }
    return rs;
  });
}

StructuredMatrixSpec::StructuredMatrixSpec(std::size_t T, std::size_t n, IntMatrix fixed,
                                           std::vector<FiniteDist> entry_dists, Rational p)
    : T_(T), n_(n), fixed_(std::move(fixed)), dists_(std::move(entry_dists)), p_(std::move(p)) {
  const std::size_t w = n + T;
  if (n == 0) throw std::invalid_argument("StructuredMatrixSpec: n must be >= 1");
  if (p_ <= 0 || p_ >= 1) throw std::invalid_argument("StructuredMatrixSpec: p must lie in (0, 1)");
  if (fixed_.rows() != T || fixed_.cols() != w)
    throw std::invalid_argument("StructuredMatrixSpec: fixed block must be T x (n+T)");
  if (dists_.size() != n * w) throw std::invalid_argument("StructuredMatrixSpec: need n x (n+T) entry distributions");
  for (const auto& d : dists_) {
    if (max_point_prob(d) > p_) throw std::invalid_argument("StructuredMatrixSpec: entry with Q > p");
    for (const auto& [v, q] : d.atoms()) (void)to_entry(v);
  }

  column_order_.resize(w);
  for (std::size_t c = 0; c < w; ++c) column_order_[c] = c + 1;
  if (T == 0) return;

  auto minor_nonzero = [&](const std::vector<std::size_t>& cols) {
    IntMatrix m(T, T);
    for (std::size_t r = 0; r < T; ++r)
      for (std::size_t c = 0; c < T; ++c) m(r, c) = fixed_(r, cols[c] - 1);
    return permanent(m) != 0;
  };
  std::vector<std::size_t> last(T);
  for (std::size_t i = 0; i < T; ++i) last[i] = n + 1 + i;
  if (minor_nonzero(last)) return;

  if (binomial(w, T) > kDefaultSubsetCap) throw CapExceededError("StructuredMatrixSpec: too many T-subsets to search");
  std::optional<std::vector<std::size_t>> found;
  for_each_subset(w, T, [&](const std::vector<std::size_t>& cols) {
    if (!found && minor_nonzero(cols)) found = cols;
  });
  if (!found) throw std::invalid_argument("StructuredMatrixSpec: no T x T submatrix of the fixed block has nonzero permanent");

  std::vector<std::size_t> order;
  for (std::size_t c = 1; c <= w; ++c)
    if (!std::binary_search(found->begin(), found->end(), c)) order.push_back(c);
  order.insert(order.end(), found->begin(), found->end());
  IntMatrix f2(T, w);
  std::vector<FiniteDist> d2(dists_.size());
  for (std::size_t c = 0; c < w; ++c) {
    for (std::size_t r = 0; r < T; ++r) f2(r, c) = fixed_(r, order[c] - 1);
    for (std::size_t r = 0; r < n; ++r) d2[r * w + c] = dists_[r * w + order[c] - 1];
  }
  fixed_ = std::move(f2);
  dists_ = std::move(d2);
  column_order_ = std::move(order);
}

StructuredMatrixSpec StructuredMatrixSpec::iid(std::size_t n, const FiniteDist& entry, const Rational& p) {
  return StructuredMatrixSpec(0, n, IntMatrix(0, n), std::vector<FiniteDist>(n * n, entry), p);
}

IntMatrix sample_structured(const StructuredMatrixSpec& spec, std::uint64_t seed) {
  IntMatrix a = blank_with_fixed(spec);
  CounterRng rng(seed, 0);
  for (std::size_t r = 0; r < spec.n(); ++r)
    for (std::size_t c = 0; c < spec.side(); ++c) a(spec.T() + r, c) = IntegerSampler(spec.dist(r, c))(rng);
  return a;
}

bool event_E(const IntMatrix& a, const StructuredMatrixSpec& spec, Int128 z, std::size_t s, const Rational& alpha) {
  check_s(spec, s, true);
  if (a.rows() != spec.side() || a.cols() != spec.side())
    throw std::invalid_argument("event_E: matrix shape does not match the spec");
  const std::uint64_t total = subset_count(spec.n(), s);
  std::uint64_t count = 0;
  for_each_subset(spec.n(), s, [&](const std::vector<std::size_t>& i) {
    count += permanent(complement_submatrix(a, ColumnSet(spec.side(), i))) != z;
  });
  return Rational(static_cast<long long>(count)) > alpha * Rational(static_cast<long long>(total));
}

InequalityReport check_easy_bound(const StructuredMatrixSpec& spec, std::size_t s, Int128 z,
                                  const EasyBoundOptions& opts) {
  check_s(spec, s, false);
  subset_count(spec.n(), s);
  subset_count(spec.n(), s - 1);
  const std::size_t upper = spec.n() - s;  // random rows inside the upper block

  // Coefficient vectors of per(A[-J]) in the next row, one per J.
  std::vector<std::vector<MinorTerm>> expansions;
  const RowEnumerator next(spec, upper, upper + 1, opts.cap);
  IntMatrix a = blank_with_fixed(spec);

  InequalityReport r;
  r.name = "easy_bound";
  r.rhs = pow_rat(spec.p(), s);
  std::uint64_t checked = 0, with_e = 0;
  std::optional<IntMatrix> argmax;

  auto visit = [&] {
    ++checked;
    if (!event_E(a, spec, 0, s, 0)) return;
    ++with_e;
    expansions.clear();
    for_each_subset(spec.n(), s - 1, [&](const std::vector<std::size_t>& j) {
      expansions.push_back(minor_expansion(a, ColumnSet(spec.side(), j)));
    });
    Rational all_equal = 0;
    const std::size_t row = spec.T() + upper;
    next.run(a, [&](const Rational& prob) {
      for (const auto& terms : expansions) {
        Int128 v = 0;
        for (const auto& t : terms) {
          Int128 prod;
          if (!checked_mul(t.coefficient, static_cast<Int128>(a(row, t.column - 1)), prod) || !checked_add(v, prod, v))
            throw OverflowError("easy_bound: minor expansion overflows 128 bits");
        }
        if (v != z) return;
      }
      all_equal += prob;
    });
    if (!argmax || all_equal > r.lhs) {
      r.lhs = all_equal;
      argmax = a;
    }
  };

  if (opts.mode == CheckMode::exact) {
    RowEnumerator(spec, 0, upper, opts.cap).run(a, [&](const Rational&) { visit(); });
  } else {
    std::vector<IntegerSampler> samplers;
    for (std::size_t rr = 0; rr < upper; ++rr)
      for (std::size_t c = 0; c < spec.side(); ++c) samplers.emplace_back(spec.dist(rr, c));
    for (std::uint64_t i = 0; i < opts.samples; ++i) {
      CounterRng rng(opts.seed, i);
      for (std::size_t rr = 0; rr < upper; ++rr)
        for (std::size_t c = 0; c < spec.side(); ++c) a(spec.T() + rr, c) = samplers[rr * spec.side() + c](rng);
      visit();
    }
  }

  r.outcome = r.lhs <= *r.rhs ? Outcome::holds : Outcome::fails;
  r.extra.emplace_back("outcomes_checked", std::to_string(checked));
  r.extra.emplace_back("outcomes_with_E", std::to_string(with_e));
  ojson w;
  w["T"] = spec.T();
  w["n"] = spec.n();
  w["s"] = s;
  w["z"] = to_string(z);
  w["mode"] = opts.mode == CheckMode::exact ? "exact" : "mc";
  if (opts.mode == CheckMode::mc) {
    w["samples"] = opts.samples;
    w["seed"] = opts.seed;
  }
  if (argmax) w["argmax_upper_block"] = matrix_json(*argmax, spec.T() + upper);
  r.witness = w.dump();
  return r;
}

InequalityReport check_markov_bound(const StructuredMatrixSpec& spec, std::size_t s, const Rational& alpha,
                                    const std::optional<Rational>& f, std::uint64_t cap) {
  check_s(spec, s, false);
  if (alpha < 0 || alpha >= 1) throw std::invalid_argument("check_markov_bound: alpha must lie in [0, 1)");
  const std::uint64_t total = subset_count(spec.n(), s);
  const Rational threshold = alpha * Rational(static_cast<long long>(total));
  std::vector<std::vector<std::size_t>> subsets;
  for_each_subset(spec.n(), s, [&](const std::vector<std::size_t>& i) { subsets.push_back(i); });

  IntMatrix a = blank_with_fixed(spec);
  Rational not_e = 0;
  std::vector<Rational> zero_prob(subsets.size(), Rational(0));
  RowEnumerator(spec, 0, spec.n() - s, cap).run(a, [&](const Rational& prob) {
    std::uint64_t nonzero = 0;
    for (std::size_t k = 0; k < subsets.size(); ++k) {
      if (permanent(complement_submatrix(a, ColumnSet(spec.side(), subsets[k]))) != 0)
        ++nonzero;
      else
        zero_prob[k] += prob;
    }
    if (!(Rational(static_cast<long long>(nonzero)) > threshold)) not_e += prob;
  });

  const Rational local_f = *std::max_element(zero_prob.begin(), zero_prob.end());
  InequalityReport r;
  r.name = "markov_bound";
  r.lhs = not_e;
  r.rhs = f.value_or(local_f) / (1 - alpha);
  r.outcome = r.lhs <= *r.rhs ? Outcome::holds : Outcome::fails;
  r.extra.emplace_back("f_source", f ? "supplied" : "local");
  r.extra.emplace_back("local_max_zero_prob", fraction_string(local_f));
  ojson w;
  w["T"] = spec.T();
  w["n"] = spec.n();
  w["s"] = s;
  w["alpha"] = fraction_string(alpha);
  if (f) w["f"] = fraction_string(*f);
  r.witness = w.dump();
  return r;
}

ThinnedPair thin_matrix(const IntMatrix& a, std::size_t T, const ColumnSet& jstar, const ColumnSet& k,
                        const std::vector<Entry>& xi_prime) {
  if (!a.square() || a.rows() <= T) throw std::out_of_range("thin_matrix: need a square matrix with more than T rows");
  const std::size_t side = a.rows(), n = side - T;
  if (jstar.universe() != side || k.universe() != side) throw std::out_of_range("thin_matrix: column set universe mismatch");
  if (jstar.size() + 1 > n) throw std::out_of_range("thin_matrix: |J*| must be at most n-1");
  if (xi_prime.size() != side) throw std::out_of_range("thin_matrix: xi' must have one entry per column");
  for (auto c : jstar.members())
    if (c > n) throw std::out_of_range("thin_matrix: J* must lie in {1..n}");
  for (auto c : k.members())
    if (c > n || jstar.contains(c)) throw std::out_of_range("thin_matrix: K must lie in {1..n} minus J*");

  ThinnedPair out;
  out.astar = complement_submatrix(a, jstar);
  const std::size_t m = out.astar.rows();  // n + T - s + 1
  const std::size_t row = m - 1;
  const ColumnSet kept_set = jstar.complement();
  const auto& kept = kept_set.members();
  for (std::size_t c = 0; c < m; ++c) {
    const std::size_t col = kept[c];
    Entry v = 0;
    if (k.contains(col) && __builtin_sub_overflow(a(row, col - 1), xi_prime[col - 1], &v))
      throw OverflowError("thin_matrix: xi - xi' overflows");
    out.astar(row, c) = v;
  }
  for (std::size_t c = m - std::min(T, m); c < m; ++c)
    if (out.astar(row, c) != 0) throw std::logic_error("thin_matrix: thinned row is nonzero in the last T columns");

  out.aprime = IntMatrix(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t src = r < T ? r : (r == T ? row : r - 1);
    for (std::size_t c = 0; c < m; ++c) out.aprime(r, c) = out.astar(src, c);
  }
  out.per = permanent(out.astar);
  if (permanent(out.aprime) != out.per) throw std::logic_error("thin_matrix: per(A*) != per(A')");
  return out;
}

std::uint64_t thin_matrix_battery(std::uint64_t instances, std::uint64_t seed) {
  for (std::uint64_t i = 0; i < instances; ++i) {
    CounterRng rng(seed, i);
    const std::size_t n = 1 + rng.uniform(4), T = rng.uniform(3), side = n + T;
    IntMatrix a(side, side);
    for (std::size_t r = 0; r < side; ++r)
      for (std::size_t c = 0; c < side; ++c) a(r, c) = static_cast<Entry>(rng.uniform(7)) - 3;
    // Columns n+1..n+T never enter the thinned row, as in the structured setting.
    const std::size_t js = rng.uniform(n);
    std::vector<std::size_t> pool(n);
    for (std::size_t c = 0; c < n; ++c) pool[c] = c + 1;
    for (std::size_t j = 0; j < n; ++j) std::swap(pool[j], pool[j + rng.uniform(n - j)]);
    std::vector<std::size_t> jm(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(js));
    std::vector<std::size_t> km;
    for (std::size_t j = js; j < n; ++j)
      if (rng.uniform(2)) km.push_back(pool[j]);
    std::sort(jm.begin(), jm.end());
    std::sort(km.begin(), km.end());
    std::vector<Entry> xi(side);
    for (auto& v : xi) v = static_cast<Entry>(rng.uniform(7)) - 3;
    thin_matrix(a, T, ColumnSet(side, jm), ColumnSet(side, km), xi);
  }
  return instances;
}

}  // namespace permlab
