#pragma once

#include <span>
#include <vector>

namespace gparse {

// N x |BIOES| matrix of raw tag scores, row-major: row n holds the scores of
// constituent n.
class ScoreTable {
 public:
  ScoreTable() = default;
  ScoreTable(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int n, int t) { return data_[static_cast<size_t>(n) * cols_ + t]; }
  double at(int n, int t) const { return data_[static_cast<size_t>(n) * cols_ + t]; }

  std::span<double> row(int n) { return {data_.data() + static_cast<size_t>(n) * cols_, size_t(cols_)}; }
  std::span<const double> row(int n) const {
    return {data_.data() + static_cast<size_t>(n) * cols_, size_t(cols_)};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace gparse
