#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "alcore/errors.hpp"

namespace alcore {

// Dense row-major n x d matrix of sample embeddings.  One row per sample.
class FeatureMatrix {
  public:
    FeatureMatrix() : rows_(0), cols_(0) {}

    FeatureMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {
        if (rows == 0 || cols == 0)
            throw argument_error("FeatureMatrix: n and d must be at least 1");
    }

    FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (rows == 0 || cols == 0)
            throw argument_error("FeatureMatrix: n and d must be at least 1");
        if (values_.size() != rows * cols)
            throw argument_error("FeatureMatrix: value count does not match n*d");
        for (double v : values_)
            if (!std::isfinite(v))
                throw argument_error("FeatureMatrix: non-finite entry");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values_.data() + i * cols_, cols_);
    }
    std::span<double> row(std::size_t i) {
        return std::span<double>(values_.data() + i * cols_, cols_);
    }

    const std::vector<double>& values() const { return values_; }

    bool operator==(const FeatureMatrix& other) const = default;

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
};

// Per-sample integer class labels in [0, C).
struct LabelVector {
    std::vector<int> labels;
    int num_classes = 0;

    LabelVector() = default;

    LabelVector(std::vector<int> labels_in, int num_classes_in)
        : labels(std::move(labels_in)), num_classes(num_classes_in) {
        if (num_classes < 2)
            throw argument_error("LabelVector: class count must be at least 2");
        for (int y : labels)
            if (y < 0 || y >= num_classes)
                throw argument_error("LabelVector: label " + std::to_string(y) +
                                     " outside [0, " + std::to_string(num_classes) + ")");
    }

    std::size_t size() const { return labels.size(); }

    bool operator==(const LabelVector& other) const = default;
};

}  // namespace alcore
