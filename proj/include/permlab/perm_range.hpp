#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "permlab/int_matrix.hpp"
#include "permlab/number.hpp"
#include "permlab/spectrum.hpp"

namespace permlab {

/// The set of permanents of n x n matrices with entries in `support`.
struct PermRange {
  std::vector<Entry> support;  // sorted, distinct
  std::size_t n = 0;
  std::vector<Int128> values;  // sorted

  bool contains(Int128 v) const;
  /// SHA-256 (hex) of the canonical text "support=..;n=..;values=..".
  std::string checksum() const;
};

struct RangeOptions {
  /// Reduction::full is used automatically for supports {-a, a} and
  /// row_multiset otherwise, unless `force_reduction` is set.
  std::optional<Reduction> force_reduction;
  std::size_t workers = 1;
};

PermRange phi(const std::vector<Entry>& support, std::size_t n, const RangeOptions& opts = {});

struct BrualdiNewmanResult {
  bool holds = false;
  std::map<Int128, IntMatrix> witnesses;  // value -> 0/1 matrix with that permanent
};

inline constexpr std::size_t kWitnessMaxN = 5;

/// Checks {0,...,2^(n-1)} is contained in the range of 0/1 permanents and
/// finds a witness matrix per value (n <= 5).
BrualdiNewmanResult check_brualdi_newman(std::size_t n, std::size_t workers = 1);

/// |range of +-1 permanents| >= n + 1.
bool check_krauter(std::size_t n, std::size_t workers = 1);
bool check_krauter(const PermRange& pm1_range);

struct GrowthRow {
  std::size_t n = 0;
  std::size_t count = 0;
  std::optional<double> log_ratio;  // ln(count(n) / count(n-1)), absent for the first row
};

/// Content-addressed store for computed ranges, keyed by (support, n).
class RangeCache {
 public:
  explicit RangeCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::filesystem::path path_for(const std::vector<Entry>& support, std::size_t n) const;
  /// Returns the stored range if present and its checksum verifies.
  std::optional<PermRange> load(const std::vector<Entry>& support, std::size_t n) const;
  void store(const PermRange& r) const;

 private:
  std::filesystem::path dir_;
};

/// |range of +-1 permanents| for n = 1..maxn, reusing cached ranges when a
/// cache is supplied.
std::vector<GrowthRow> growth_report(std::size_t maxn, const RangeCache* cache = nullptr, std::size_t workers = 1);

std::string range_to_json(const PermRange& r);
PermRange range_from_json(const std::string& text);
std::vector<Entry> parse_support(const std::string& csv);

}  // namespace permlab
