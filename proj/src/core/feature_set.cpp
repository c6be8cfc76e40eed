#include "histoprompt/core/feature_set.hpp"

#include <cmath>
#include <string>

#include "histoprompt/core/error.hpp"

namespace histoprompt {

void FeatureSet::check() const {
    if (values.size() != rows * dim) {
        throw Error(ErrorCode::InvalidFeatureSet,
                    "value count " + std::to_string(values.size()) + " != rows*dim " + std::to_string(rows * dim));
    }
    if (ids.size() != rows || labels.size() != rows) {
        throw Error(ErrorCode::InvalidFeatureSet, "ids/labels must have one entry per row");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw Error(ErrorCode::InvalidFeatureSet, "non-finite value at row " + std::to_string(i / dim) +
                                                          ", column " + std::to_string(i % dim));
        }
    }
}

FeatureSet FeatureSet::from_rows(std::size_t rows, std::size_t dim, std::vector<float> values) {
    FeatureSet fs;
    fs.rows = rows;
    fs.dim = dim;
    fs.values = std::move(values);
    fs.ids.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) fs.ids.push_back(std::to_string(i));
    fs.labels.assign(rows, std::string{});
    return fs;
}

Matrix Matrix::from(const FeatureSet& fs) {
    Matrix m(fs.rows, fs.dim);
    for (std::size_t i = 0; i < fs.values.size(); ++i) m.data_[i] = static_cast<double>(fs.values[i]);
    return m;
}

}  // namespace histoprompt
