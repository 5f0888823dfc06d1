#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace oppscreen {

struct SparseEntry {
  std::uint32_t col = 0;
  double value = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

using SparseRow = std::vector<SparseEntry>;

// Compressed sparse rows; column indices strictly increasing within a row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t cols) : cols_(cols) {}

  void add_row(std::span<const SparseEntry> row) {
    entries_.insert(entries_.end(), row.begin(), row.end());
    offsets_.push_back(entries_.size());
  }

  std::size_t rows() const { return offsets_.size() - 1; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return entries_.size(); }

  std::span<const SparseEntry> row(std::size_t r) const {
    return {entries_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }

  SparseMatrix select_rows(std::span<const std::size_t> idx) const {
    SparseMatrix out(cols_);
    for (std::size_t r : idx) out.add_row(row(r));
    return out;
  }

 private:
  std::size_t cols_ = 0;
  std::vector<SparseEntry> entries_;
  std::vector<std::size_t> offsets_{0};
};

inline double dot(std::span<const SparseEntry> row, const std::vector<double>& w) {
  double s = 0.0;
  for (const auto& e : row) s += e.value * w[e.col];
  return s;
}

}  // namespace oppscreen
