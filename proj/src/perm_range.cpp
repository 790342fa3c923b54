#include "permlab/perm_range.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>
#include <openssl/evp.h>

#include "permlab/permanent.hpp"

namespace permlab {

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

bool sign_symmetric_pair(const std::vector<Entry>& s) { return s.size() == 2 && s[0] == -s[1] && s[1] != 0; }

std::vector<Entry> normalized_support(std::vector<Entry> s) {
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw std::invalid_argument("support has duplicate values");
  if (s.empty()) throw std::invalid_argument("support is empty");
  return s;
}

}  // namespace

bool PermRange::contains(Int128 v) const { return std::binary_search(values.begin(), values.end(), v); }

std::string PermRange::checksum() const {
  std::string text = "support=";
  for (std::size_t i = 0; i < support.size(); ++i) text += (i ? "," : "") + std::to_string(support[i]);
  text += ";n=" + std::to_string(n) + ";values=";
  for (std::size_t i = 0; i < values.size(); ++i) text += (i ? "," : "") + to_string(values[i]);
  return sha256_hex(text);
}

PermRange phi(const std::vector<Entry>& support_in, std::size_t n, const RangeOptions& opts) {
  PermRange r;
  r.support = normalized_support(support_in);
  r.n = n;
  std::vector<Rational> vals(r.support.begin(), r.support.end());
  EnumerationOptions eo;
  eo.workers = opts.workers;
  eo.reduction = opts.force_reduction.value_or(sign_symmetric_pair(r.support) ? Reduction::full : Reduction::row_multiset);
  const Spectrum s = exact_spectrum(n, FiniteDist::uniform(vals), eo);
  r.values.reserve(s.counts.size());
  for (const auto& [v, c] : s.counts) r.values.push_back(v);
  return r;
}

BrualdiNewmanResult check_brualdi_newman(std::size_t n, std::size_t workers) {
  if (n == 0) throw std::invalid_argument("check_brualdi_newman: n must be >= 1");
  const PermRange range = phi({0, 1}, n, {std::nullopt, workers});
  const Int128 top = static_cast<Int128>(1) << (n - 1);
  BrualdiNewmanResult res;
  res.holds = true;
  for (Int128 v = 0; v <= top; ++v) res.holds = res.holds && range.contains(v);
  if (n > kWitnessMaxN || !res.holds) return res;

  // Scan 0/1 matrices with non-decreasing row codes; first hit per value wins.
  const std::size_t m = std::size_t{1} << n;
  std::vector<std::size_t> code(n, 0);
  std::vector<Entry> a(n * n);
  for (;;) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) a[r * n + c] = static_cast<Entry>((code[r] >> (n - 1 - c)) & 1);
    const Int128 per = detail::ryser_dense(a.data(), n);
    if (per >= 0 && per <= top && !res.witnesses.contains(per)) {
      res.witnesses.emplace(per, IntMatrix(n, n, a));
      if (res.witnesses.size() == static_cast<std::size_t>(top + 1)) break;
    }
    std::size_t pos = n;
    while (pos > 0 && code[pos - 1] + 1 == m) --pos;
    if (pos == 0) break;
    ++code[pos - 1];
    for (std::size_t q = pos; q < n; ++q) code[q] = code[pos - 1];
  }
  res.holds = res.witnesses.size() == static_cast<std::size_t>(top + 1);
  return res;
}

bool check_krauter(const PermRange& r) { return r.values.size() >= r.n + 1; }

bool check_krauter(std::size_t n, std::size_t workers) { return check_krauter(phi({-1, 1}, n, {std::nullopt, workers})); }

std::filesystem::path RangeCache::path_for(const std::vector<Entry>& support, std::size_t n) const {
  std::string name = "phi_s";
  for (std::size_t i = 0; i < support.size(); ++i) name += (i ? "_" : "") + std::to_string(support[i]);
  return dir_ / (name + "_n" + std::to_string(n) + ".json");
}

std::optional<PermRange> RangeCache::load(const std::vector<Entry>& support, std::size_t n) const {
  const auto path = path_for(normalized_support(support), n);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return range_from_json(ss.str());
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

void RangeCache::store(const PermRange& r) const {
  std::filesystem::create_directories(dir_);
  std::ofstream out(path_for(r.support, r.n));
  out << range_to_json(r) << '\n';
}

std::vector<GrowthRow> growth_report(std::size_t maxn, const RangeCache* cache, std::size_t workers) {
  std::vector<GrowthRow> rows;
  for (std::size_t n = 1; n <= maxn; ++n) {
    std::optional<PermRange> r = cache ? cache->load({-1, 1}, n) : std::nullopt;
    if (!r) {
      r = phi({-1, 1}, n, {std::nullopt, workers});
      if (cache) cache->store(*r);
    }
    GrowthRow row{n, r->values.size(), std::nullopt};
    if (!rows.empty())
      row.log_ratio = std::log(static_cast<double>(row.count) / static_cast<double>(rows.back().count));
    rows.push_back(row);
  }
  return rows;
}

std::string range_to_json(const PermRange& r) {
  nlohmann::ordered_json j;
  j["support"] = r.support;
  j["n"] = r.n;
  auto vals = nlohmann::ordered_json::array();
  for (Int128 v : r.values) vals.push_back(to_string(v));
  j["values"] = std::move(vals);
  j["count"] = r.values.size();
  j["sha"] = r.checksum();
  return j.dump();
}

PermRange range_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    PermRange r;
    r.support = normalized_support(j.at("support").get<std::vector<Entry>>());
    r.n = j.at("n").get<std::size_t>();
    for (const auto& v : j.at("values")) r.values.push_back(parse_int128(v.get<std::string>()));
    if (!std::is_sorted(r.values.begin(), r.values.end())) throw ParseError("range JSON: values not sorted");
    if (j.at("count").get<std::size_t>() != r.values.size()) throw ParseError("range JSON: count mismatch");
    if (j.at("sha").get<std::string>() != r.checksum()) throw ParseError("range JSON: checksum mismatch");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("range JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("range JSON: ") + e.what());
  }
}

std::vector<Entry> parse_support(const std::string& csv) {
  std::vector<Entry> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const Int128 v = parse_int128(tok);
    if (v > INT64_MAX || v < -INT64_MAX) throw OverflowError("support value exceeds 64 bits");
    out.push_back(static_cast<Entry>(v));
  }
  if (out.empty()) throw ParseError("empty support list");
  return out;
}

}  // namespace permlab
