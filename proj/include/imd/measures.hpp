#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imd/error.hpp"

namespace imd {

using Point = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
    double sum() const;

    const std::vector<double>& data() const { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Finite nonnegative measure on a point cloud. Duplicate atoms are allowed
/// and never merged.
class DiscreteMeasure {
  public:
    DiscreteMeasure() = default;
    DiscreteMeasure(std::vector<Point> points, std::vector<double> weights);

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    /// Dimension of the atoms; 0 for the empty measure.
    std::size_t dimension() const { return points_.empty() ? 0 : points_.front().size(); }

    const std::vector<Point>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    const Point& point(std::size_t i) const { return points_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    double mass() const;
    bool is_probability(double tol = 1e-12) const;

    DiscreteMeasure scaled(double factor) const;

  private:
    std::vector<Point> points_;
    std::vector<double> weights_;
};

/// Points with class labels. Labels are stored 0-based (class k is label k-1);
/// the CSV format uses 1-based labels.
class LabeledDataset {
  public:
    LabeledDataset() = default;
    LabeledDataset(std::vector<Point> points, std::vector<int> labels, int num_classes);

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    int num_classes() const { return num_classes_; }
    std::size_t dimension() const { return points_.empty() ? 0 : points_.front().size(); }

    const std::vector<Point>& points() const { return points_; }
    const std::vector<int>& labels() const { return labels_; }

    std::vector<std::size_t> class_counts() const;
    /// n_k / n for every class.
    std::vector<double> class_proportions() const;
    /// Dataset indices of the members of class k, in dataset order.
    std::vector<std::size_t> class_indices(int k) const;

  private:
    std::vector<Point> points_;
    std::vector<int> labels_;
    int num_classes_ = 0;
};

struct ClassDecomposition {
    std::vector<DiscreteMeasure> conditionals;
    std::vector<double> proportions;
    /// members[k][j] is the dataset index of atom j of conditionals[k].
    std::vector<std::vector<std::size_t>> members;
    std::vector<int> empty_classes;
};

enum class Metric { euclidean };

/// Pairwise ground distances between two point sets.
class CostMatrix {
  public:
    CostMatrix() = default;
    explicit CostMatrix(Matrix entries);

    std::size_t rows() const { return entries_.rows(); }
    std::size_t cols() const { return entries_.cols(); }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
    const Matrix& entries() const { return entries_; }

    /// Restriction to a subset of columns, in the given order.
    CostMatrix select_columns(std::span<const std::size_t> cols) const;

  private:
    Matrix entries_;
};

DiscreteMeasure empirical_measure(const LabeledDataset& dataset);
DiscreteMeasure empirical_measure(const std::vector<Point>& points);

/// Uniform conditional per class plus the proportion vector. Empty classes
/// yield a mass-0 conditional and p_k = 0 and are listed in empty_classes.
ClassDecomposition class_conditionals(const LabeledDataset& dataset);

CostMatrix cost_matrix(const std::vector<Point>& a, const std::vector<Point>& b,
                       Metric metric = Metric::euclidean);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// base + sum_k coeffs[k] * components[k], atoms concatenated.
DiscreteMeasure mix(const DiscreteMeasure& base, const std::vector<DiscreteMeasure>& components,
                    std::span<const double> coeffs);

/// Sum of the weights of atoms sharing coordinates, in first-seen order.
DiscreteMeasure merge_duplicates(const DiscreteMeasure& measure);

}  // namespace imd
