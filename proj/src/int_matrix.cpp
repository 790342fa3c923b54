#include "permlab/int_matrix.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "permlab/number.hpp"

namespace permlab {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) throw std::invalid_argument("IntMatrix: entry count does not match shape");
}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<Entry>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("IntMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Entry IntMatrix::max_abs() const {
  Entry best = 0;
  for (Entry e : data_) best = std::max(best, e < 0 ? -e : e);
  return best;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

ColumnSet::ColumnSet(std::size_t universe, std::vector<std::size_t> members)
    : universe_(universe), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    throw std::invalid_argument("ColumnSet: duplicate index");
  if (!members_.empty() && (members_.front() < 1 || members_.back() > universe_))
    throw std::out_of_range("ColumnSet: index outside {1,...,universe}");
}

bool ColumnSet::contains(std::size_t i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

ColumnSet ColumnSet::with(std::size_t i) const {
  if (contains(i)) throw std::invalid_argument("ColumnSet::with: index already present");
  auto m = members_;
  m.push_back(i);
  return ColumnSet(universe_, std::move(m));
}

ColumnSet ColumnSet::without(std::size_t i) const {
  if (!contains(i)) throw std::invalid_argument("ColumnSet::without: index absent");
  auto m = members_;
  m.erase(std::find(m.begin(), m.end(), i));
  return ColumnSet(universe_, std::move(m));
}

ColumnSet ColumnSet::complement() const {
  std::vector<std::size_t> m;
  for (std::size_t i = 1; i <= universe_; ++i)
    if (!contains(i)) m.push_back(i);
  return ColumnSet(universe_, std::move(m));
}

IntMatrix read_matrix(std::istream& in) {
  std::string tok_rows, tok_cols;
  if (!(in >> tok_rows >> tok_cols)) throw ParseError("matrix: missing 'rows cols' header");
  const Int128 r = parse_int128(tok_rows), c = parse_int128(tok_cols);
  if (r < 0 || c < 0 || r > 4096 || c > 4096) throw ParseError("matrix: bad shape");
  const auto rows = static_cast<std::size_t>(r), cols = static_cast<std::size_t>(c);
  std::vector<Entry> data;
  data.reserve(rows * cols);
  std::string tok;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    if (!(in >> tok)) throw ParseError("matrix: expected " + std::to_string(rows * cols) + " entries");
    const Int128 v = parse_int128(tok);
    if (v > INT64_MAX || v < -INT64_MAX) throw OverflowError("matrix: entry exceeds 64 bits");
    data.push_back(static_cast<Entry>(v));
  }
  if (in >> tok) throw ParseError("matrix: trailing data '" + tok + "'");
  return IntMatrix(rows, cols, std::move(data));
}

IntMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file: " + path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const IntMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
    out << '\n';
  }
}

}  // namespace permlab
