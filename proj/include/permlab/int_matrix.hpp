#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace permlab {

using Entry = std::int64_t;

/// Dense row-major integer matrix. Element access is 0-based; the
/// submatrix helpers in permanent.hpp take 1-based column sets.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols, Entry fill = 0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  IntMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries);
  IntMatrix(std::initializer_list<std::initializer_list<Entry>> rows);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  Entry& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Entry operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Entry> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Entry> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const Entry> entries() const { return data_; }

  Entry max_abs() const;
  IntMatrix transpose() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Entry> data_;
};

/// Sorted set of distinct 1-based column indices drawn from {1,...,universe}.
class ColumnSet {
 public:
  ColumnSet() = default;
  ColumnSet(std::size_t universe, std::vector<std::size_t> members);

  std::size_t universe() const { return universe_; }
  std::size_t size() const { return members_.size(); }
  const std::vector<std::size_t>& members() const { return members_; }
  bool contains(std::size_t i) const;

  /// I + i; throws if i is already present.
  ColumnSet with(std::size_t i) const;
  /// I - i; throws if i is absent.
  ColumnSet without(std::size_t i) const;
  /// -I within the universe.
  ColumnSet complement() const;

  friend bool operator==(const ColumnSet&, const ColumnSet&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::size_t> members_;
};

// Text format: "rows cols" header, then rows of whitespace-separated integers.
IntMatrix read_matrix(std::istream& in);
IntMatrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const IntMatrix& m);

}  // namespace permlab
