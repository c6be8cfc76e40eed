#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace histoprompt {

/// n x d embedding matrix (row-major, 32-bit as stored on disk) with
/// per-row record identifiers and class labels.
struct FeatureSet {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<float> values;
    std::vector<std::string> ids;
    std::vector<std::string> labels;

    std::span<const float> row(std::size_t i) const { return {values.data() + i * dim, dim}; }

    /// Throws InvalidFeatureSet when shapes disagree or a value is not finite.
    void check() const;

    /// Builds a set from a dense row-major matrix with ids "0".."n-1" and
    /// empty labels. Intended for tests and synthetic inputs.
    static FeatureSet from_rows(std::size_t rows, std::size_t dim, std::vector<float> values);
};

/// Row-major double matrix used by the analytic modules.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from(const FeatureSet& fs);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace histoprompt
