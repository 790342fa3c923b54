#include "permlab/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "permlab/constants.hpp"
#include "permlab/finite_dist.hpp"
#include "permlab/inequality_lab.hpp"
#include "permlab/perm_range.hpp"
#include "permlab/permanent.hpp"
#include "permlab/spectrum.hpp"
#include "permlab/structured.hpp"

namespace permlab {

namespace {

using ojson = nlohmann::ordered_json;

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string output;
};

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

std::size_t workers_from_env(std::size_t fallback) {
  const char* env = std::getenv("PERMLAB_WORKERS");
  if (!env || !*env) return fallback;
  const Int128 v = parse_int128(env);
  if (v < 1 || v > 4096) throw ParseError("PERMLAB_WORKERS must lie in [1, 4096]");
  return static_cast<std::size_t>(v);
}

FiniteDist entry_dist(const std::string& support, const std::string& probs, const std::string& dist_file) {
  if (!dist_file.empty()) {
    std::ifstream in(dist_file);
    if (!in) throw ParseError("cannot open distribution file '" + dist_file + "'");
    return read_dist(in);
  }
  std::vector<Rational> values;
  for (auto v : parse_support(support)) values.emplace_back(v);
  if (probs.empty()) return FiniteDist::uniform(values);
  const auto ps = split_csv(probs);
  if (ps.size() != values.size()) throw ParseError("--probs must list one probability per support value");
  FiniteDist::AtomMap atoms;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (!atoms.emplace(values[i], parse_rational(ps[i])).second) throw ParseError("duplicate support value");
  return FiniteDist(std::move(atoms));
}

Reduction auto_reduction(const FiniteDist& d) {
  const auto& atoms = d.atoms();
  const Rational first = atoms.begin()->second;
  for (const auto& [v, q] : atoms)
    if (q != first) return Reduction::none;
  if (atoms.size() == 2 && atoms.begin()->first == -atoms.rbegin()->first) return Reduction::full;
  return Reduction::row_multiset;
}

ojson matrix_rows(const IntMatrix& a) {
  ojson m = ojson::array();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    ojson row = ojson::array();
    for (std::size_t c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    m.push_back(std::move(row));
  }
  return m;
}

int cmd_per(const std::string& path, const std::string& kernel, bool json, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  const IntMatrix a = read_matrix(in);
  if (!a.square()) throw std::invalid_argument("matrix must be square");
  std::optional<Int128> naive, ryser;
  if (kernel == "naive" || kernel == "both") naive = per_naive(a);
  if (kernel == "ryser" || kernel == "both") ryser = per_ryser(a);
  const Int128 value = ryser ? *ryser : *naive;
  const bool agree = !(naive && ryser) || *naive == *ryser;
  if (json) {
    ojson j;
    j["per"] = to_string(value);
    j["kernel"] = kernel;
    if (naive && ryser) j["agreement"] = agree;
    out << j.dump() << '\n';
  } else {
    out << to_string(value) << '\n';
    if (naive && ryser) out << "agreement=" << (agree ? "true" : "false") << '\n';
  }
  return agree ? kExitOk : kExitCheckFailed;
}

struct SpectrumArgs {
  std::size_t n = 0;
  std::string support = "-1,1";
  std::string probs;
  std::string dist_file;
  std::string reduction = "auto";
  bool mc = false;
  std::uint64_t samples = 100000;
  std::string targets = "0";
  std::string format = "json";
  double work_cap = 0x1p36;
};

int cmd_spectrum(const SpectrumArgs& a, const RunConfig& cfg, std::ostream& out) {
  const FiniteDist d = entry_dist(a.support, a.probs, a.dist_file);
  Spectrum s;
  if (a.mc) {
    std::vector<Int128> targets;
    for (const auto& t : split_csv(a.targets)) targets.push_back(parse_int128(t));
    s = mc_spectrum(a.n, d, targets, a.samples, cfg.seed, cfg.workers);
  } else {
    EnumerationOptions opts;
    opts.workers = cfg.workers;
    opts.work_cap = a.work_cap;
    opts.reduction = a.reduction == "auto" ? auto_reduction(d) : parse_reduction(a.reduction);
    s = exact_spectrum(a.n, d, opts);
  }
  out << (a.format == "csv" ? spectrum_to_csv(s) : spectrum_to_json(s));
  if (a.format != "csv") out << '\n';
  return kExitOk;
}

struct RangeArgs {
  std::string support = "-1,1";
  std::size_t n = 0;
  std::string cache;
  std::size_t brualdi_newman = 0;
  std::size_t krauter = 0;
  std::size_t growth = 0;
  std::string format = "json";
};

bool negation_closed(const PermRange& r) {
  for (Int128 v : r.values)
    if (!r.contains(-v)) return false;
  return true;
}

int cmd_range(const RangeArgs& a, const RunConfig& cfg, std::ostream& out) {
  const int modes = (a.n > 0) + (a.brualdi_newman > 0) + (a.krauter > 0) + (a.growth > 0);
  if (modes != 1) throw std::invalid_argument("range: give exactly one of --n, --brualdi-newman, --krauter, --growth");
  std::optional<RangeCache> cache;
  if (!a.cache.empty()) cache.emplace(a.cache);

  if (a.brualdi_newman) {
    const auto res = check_brualdi_newman(a.brualdi_newman, cfg.workers);
    ojson j;
    j["check"] = "brualdi_newman";
    j["n"] = a.brualdi_newman;
    j["holds"] = res.holds;
    ojson w = ojson::object();
    for (const auto& [v, m] : res.witnesses) w[to_string(v)] = matrix_rows(m);
    j["witnesses"] = std::move(w);
    out << j.dump() << '\n';
    return res.holds ? kExitOk : kExitCheckFailed;
  }
  if (a.krauter) {
    const PermRange r = phi({-1, 1}, a.krauter, {std::nullopt, cfg.workers});
    const bool holds = check_krauter(r);
    ojson j;
    j["check"] = "krauter";
    j["n"] = a.krauter;
    j["count"] = r.values.size();
    j["holds"] = holds;
    out << j.dump() << '\n';
    return holds ? kExitOk : kExitCheckFailed;
  }
  if (a.growth) {
    const auto rows = growth_report(a.growth, cache ? &*cache : nullptr, cfg.workers);
    if (a.format == "csv") {
      out << "n,count,log_ratio\n";
      for (const auto& r : rows) {
        out << r.n << ',' << r.count << ',';
        if (r.log_ratio) out << std::setprecision(12) << *r.log_ratio;
        out << '\n';
      }
    } else {
      ojson j = ojson::array();
      for (const auto& r : rows) {
        ojson e;
        e["n"] = r.n;
        e["count"] = r.count;
        e["log_ratio"] = r.log_ratio ? ojson(*r.log_ratio) : ojson(nullptr);
        j.push_back(std::move(e));
      }
      out << j.dump() << '\n';
    }
    return kExitOk;
  }

  const auto support = parse_support(a.support);
  std::optional<PermRange> r = cache ? cache->load(support, a.n) : std::nullopt;
  if (!r) {
    r = phi(support, a.n, {std::nullopt, cfg.workers});
    if (cache) cache->store(*r);
  }
  ojson j = ojson::parse(range_to_json(*r));
  j["negation_closed"] = negation_closed(*r);
  out << j.dump() << '\n';
  return kExitOk;
}

struct VerifyArgs {
  std::vector<std::string> checks;
  std::uint64_t instances = 1000;
  std::size_t halasz_max_n = 10;
};

const std::vector<std::string> kChecks = {"monotonicity", "duplication", "kesten", "halasz",   "assumption",
                                          "heavy-pairs",  "easy-bound",  "markov", "thin"};

InequalityReport thin_report(std::uint64_t instances, std::uint64_t seed) {
  InequalityReport r;
  r.name = "thin_matrix_battery";
  ojson w;
  w["instances"] = instances;
  w["seed"] = seed;
  try {
    r.lhs = Rational(static_cast<long long>(thin_matrix_battery(instances, seed)));
    r.outcome = Outcome::holds;
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e)) throw;
    r.outcome = Outcome::fails;
    r.note = e.what();
  }
  r.witness = w.dump();
  return r;
}

int cmd_verify(const VerifyArgs& a, const RunConfig& cfg, std::ostream& out) {
  std::vector<std::string> wanted;
  for (const auto& c : a.checks) {
    if (c == "all") {
      wanted = kChecks;
      break;
    }
    if (std::find(kChecks.begin(), kChecks.end(), c) == kChecks.end()) throw ParseError("unknown check '" + c + "'");
    if (std::find(wanted.begin(), wanted.end(), c) == wanted.end()) wanted.push_back(c);
  }
  const BatteryConfig bc{a.instances, cfg.seed, cfg.workers};
  const std::map<std::string, std::function<InequalityReport()>> run = {
      {"monotonicity", [&] { return monotonicity_battery(bc); }},
      {"duplication", [&] { return duplication_battery(bc); }},
      {"kesten", [&] { return kesten_rademacher_battery(2, 20); }},
      {"halasz", [&] { return halasz_battery(bc, a.halasz_max_n); }},
      {"assumption", [&] { return assumption_battery(bc); }},
      {"heavy-pairs", [&] { return heavy_pairs_battery(bc); }},
      {"easy-bound", [&] { return easy_bound_family(3, 1, cfg.workers); }},
      {"markov", [&] { return markov_family(3, 1, cfg.workers); }},
      {"thin", [&] { return thin_report(a.instances, cfg.seed); }},
  };
  bool ok = true;
  for (const auto& c : wanted) {
    const InequalityReport r = run.at(c)();
    ok = ok && r.ok();
    out << report_to_json(r) << '\n';
  }
  return ok ? kExitOk : kExitCheckFailed;
}

struct ConstantsArgs {
  std::string p = "1/2";
  std::string delta = "1/10";
  std::uint64_t n_hyp = 100;
  std::uint64_t step_n = 0;
  std::vector<std::string> f_bounds;
  bool json = false;
};

int cmd_constants(const ConstantsArgs& a, std::ostream& out) {
  const ConstantChain ch = derive_constants(parse_rational(a.p), parse_rational(a.delta), a.n_hyp);
  std::map<std::uint64_t, Rational> f;
  for (const auto& kv : a.f_bounds) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("--f expects m=value, got '" + kv + "'");
    const Int128 m = parse_int128(kv.substr(0, eq));
    if (m < 0) throw ParseError("--f index must be >= 0");
    f[static_cast<std::uint64_t>(m)] = parse_rational(kv.substr(eq + 1));
  }
  const std::uint64_t n = std::max<std::uint64_t>({a.step_n ? a.step_n : ch.big_n, ch.big_n, ch.t, 1});
  const InductiveStepReport step = check_inductive_step(ch, f, n);
  if (a.json) {
    ojson j;
    j["chain"] = ojson::parse(chain_to_json(ch));
    j["inductive_step"] = ojson::parse(step_to_json(step));
    out << j.dump() << '\n';
  } else {
    out << "p=" << value_string(ch.p) << " delta=" << value_string(ch.delta) << " N=" << ch.big_n << " t=" << ch.t
        << '\n';
    out << "tau in [" << decimal_string(ch.tau.lo, 15) << ", " << decimal_string(ch.tau.hi, 15) << "+]\n";
    out << "mu=" << decimal_string(ch.mu, 15) << " eps=" << decimal_string(ch.eps, 15)
        << " c=" << decimal_string(ch.c, 15) << '\n';
    for (const auto& c : ch.constraints)
      out << (c.satisfied ? "ok   " : "FAIL ") << c.name << ": " << c.statement << '\n';
    out << "inductive step at n=" << step.n << ": " << (step.holds() ? "holds" : "fails");
    if (step.first_failure) out << " (first failing line " << *step.first_failure << ")";
    out << "\nfeasible=" << (ch.feasible() ? "true" : "false") << '\n';
  }
  return ch.feasible() && step.holds() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and Monte Carlo experiments on permanents of random matrices", "permlab"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "Master seed for all randomness")->capture_default_str();
  app.add_option("--workers", cfg.workers, "Worker threads (PERMLAB_WORKERS overrides)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{4096}))
      ->capture_default_str();
  app.add_option("--output", cfg.output, "Write results to this file instead of stdout");

  std::string matrix, kernel = "ryser";
  bool per_json = false;
  auto* per = app.add_subcommand("per", "Permanent of a matrix file");
  per->add_option("--matrix", matrix, "Matrix file: 'rows cols' header then entries")->required();
  per->add_option("--kernel", kernel)->check(CLI::IsMember({"naive", "ryser", "both"}))->capture_default_str();
  per->add_flag("--json", per_json);

  SpectrumArgs sa;
  auto* spec = app.add_subcommand("spectrum", "Distribution of per(A_n) for i.i.d. entries");
  spec->add_option("--n", sa.n)->required()->check(CLI::Range(std::size_t{1}, kRyserMaxSide));
  spec->add_option("--support", sa.support, "Comma-separated integer support")->capture_default_str();
  spec->add_option("--probs", sa.probs, "Comma-separated probabilities (default uniform)");
  spec->add_option("--dist", sa.dist_file, "Distribution file, overrides --support/--probs");
  spec->add_option("--reduction", sa.reduction)
      ->check(CLI::IsMember({"auto", "none", "row-multiset", "full"}))
      ->capture_default_str();
  spec->add_flag("--mc", sa.mc, "Monte Carlo estimate instead of exact enumeration");
  spec->add_option("--samples", sa.samples)->capture_default_str();
  spec->add_option("--targets", sa.targets, "Comma-separated values to estimate")->capture_default_str();
  spec->add_option("--format", sa.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  spec->add_option("--work-cap", sa.work_cap, "Enumeration work cap")->capture_default_str();

  RangeArgs ra;
  auto* range = app.add_subcommand("range", "Set of attainable permanent values");
  range->add_option("--support", ra.support)->capture_default_str();
  range->add_option("--n", ra.n);
  range->add_option("--cache", ra.cache, "Directory of content-addressed range files");
  range->add_option("--brualdi-newman", ra.brualdi_newman, "Check {0..2^(n-1)} within the 0/1 range");
  range->add_option("--krauter", ra.krauter, "Check the +-1 range has at least n+1 values");
  range->add_option("--growth", ra.growth, "Range sizes for +-1 matrices, n = 1..MAXN");
  range->add_option("--format", ra.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Inequality batteries and recursion checks");
  verify->add_option("--check", va.checks, "One or more of: all, " + [] {
    std::string s;
    for (const auto& c : kChecks) s += (s.empty() ? "" : ", ") + c;
    return s;
  }())->delimiter(',');
  verify->add_option("--instances", va.instances)->capture_default_str();
  verify->add_option("--halasz-max-n", va.halasz_max_n)->capture_default_str();

  ConstantsArgs ca;
  auto* cons = app.add_subcommand("constants", "Constant chain and inductive step");
  cons->add_option("--p", ca.p)->capture_default_str();
  cons->add_option("--delta", ca.delta)->capture_default_str();
  cons->add_option("--N", ca.n_hyp)->capture_default_str();
  cons->add_option("--step-n", ca.step_n, "n for the inductive step (default N)");
  cons->add_option("--f", ca.f_bounds, "Bound on f(m) as m=value; repeatable");
  cons->add_flag("--json", ca.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitParse;
  }
  if (va.checks.empty()) va.checks = {"all"};

  try {
    cfg.workers = workers_from_env(cfg.workers);
    std::ofstream file;
    if (!cfg.output.empty()) {
      file.open(cfg.output);
      if (!file) throw ParseError("cannot open output file '" + cfg.output + "'");
    }
    std::ostream& sink = cfg.output.empty() ? out : file;
    if (*per) return cmd_per(matrix, kernel, per_json, sink);
    if (*spec) return cmd_spectrum(sa, cfg, sink);
    if (*range) return cmd_range(ra, cfg, sink);
    if (*verify) return cmd_verify(va, cfg, sink);
    return cmd_constants(ca, sink);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const OverflowError& e) {
    err << "overflow: " << e.what() << '\n';
    return kExitOverflow;
  } catch (const CapExceededError& e) {
    err << "cap exceeded: " << e.what() << '\n';
    return kExitCap;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::out_of_range& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    err << "check failed: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace permlab
