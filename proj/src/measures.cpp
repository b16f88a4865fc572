#include "imd/measures.hpp"

#include <cmath>
#include <map>
#include <numeric>

namespace imd {

std::vector<double> Matrix::row_sums() const {
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j);
    return out;
}

std::vector<double> Matrix::col_sums() const {
    std::vector<double> out(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out[j] += (*this)(i, j);
    return out;
}

double Matrix::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

DiscreteMeasure::DiscreteMeasure(std::vector<Point> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() != weights_.size())
        throw Error("DiscreteMeasure: " + std::to_string(points_.size()) + " points but " +
                    std::to_string(weights_.size()) + " weights");
    for (double w : weights_) {
        if (!std::isfinite(w) || w < 0.0) throw Error("DiscreteMeasure: weights must be finite and >= 0");
    }
    for (const auto& p : points_) {
        if (p.size() != points_.front().size()) throw Error("DiscreteMeasure: mixed point dimensions");
    }
}

double DiscreteMeasure::mass() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

bool DiscreteMeasure::is_probability(double tol) const { return std::abs(mass() - 1.0) <= tol; }

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
    if (factor < 0.0) throw Error("DiscreteMeasure::scaled: negative factor");
    std::vector<double> w(weights_);
    for (double& x : w) x *= factor;
    return {points_, std::move(w)};
}

LabeledDataset::LabeledDataset(std::vector<Point> points, std::vector<int> labels, int num_classes)
    : points_(std::move(points)), labels_(std::move(labels)), num_classes_(num_classes) {
    if (num_classes_ < 1) throw Error("LabeledDataset: need at least one class");
    if (points_.size() != labels_.size()) throw Error("LabeledDataset: points/labels length mismatch");
    for (int y : labels_) {
        if (y < 0 || y >= num_classes_)
            throw Error("LabeledDataset: label " + std::to_string(y + 1) + " outside 1.." +
                        std::to_string(num_classes_));
    }
    for (const auto& p : points_) {
        if (p.size() != points_.front().size()) throw Error("LabeledDataset: mixed point dimensions");
    }
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes_), 0);
    for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

std::vector<double> LabeledDataset::class_proportions() const {
    auto counts = class_counts();
    std::vector<double> p(counts.size(), 0.0);
    if (labels_.empty()) return p;
    const double n = static_cast<double>(labels_.size());
    for (std::size_t k = 0; k < counts.size(); ++k) p[k] = static_cast<double>(counts[k]) / n;
    return p;
}

std::vector<std::size_t> LabeledDataset::class_indices(int k) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == k) idx.push_back(i);
    return idx;
}

CostMatrix::CostMatrix(Matrix entries) : entries_(std::move(entries)) {
    for (double v : entries_.data()) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error("CostMatrix: entries must be finite and >= 0");
    }
}

CostMatrix CostMatrix::select_columns(std::span<const std::size_t> cols) const {
    Matrix m(rows(), cols.size());
    for (std::size_t i = 0; i < rows(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) m(i, j) = entries_(i, cols[j]);
    return CostMatrix(std::move(m));
}

DiscreteMeasure empirical_measure(const std::vector<Point>& points) {
    if (points.empty()) throw Error("empirical_measure: empty sample");
    const double w = 1.0 / static_cast<double>(points.size());
    return {points, std::vector<double>(points.size(), w)};
}

DiscreteMeasure empirical_measure(const LabeledDataset& dataset) { return empirical_measure(dataset.points()); }

ClassDecomposition class_conditionals(const LabeledDataset& dataset) {
    ClassDecomposition out;
    out.proportions = dataset.class_proportions();
    for (int k = 0; k < dataset.num_classes(); ++k) {
        auto idx = dataset.class_indices(k);
        std::vector<Point> pts;
        pts.reserve(idx.size());
        for (auto i : idx) pts.push_back(dataset.points()[i]);
        if (pts.empty()) {
            out.conditionals.emplace_back();
            out.empty_classes.push_back(k);
        } else {
            out.conditionals.push_back(empirical_measure(pts));
        }
        out.members.push_back(std::move(idx));
    }
    return out;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

CostMatrix cost_matrix(const std::vector<Point>& a, const std::vector<Point>& b, Metric metric) {
    (void)metric;  // only euclidean for now
    Matrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (a[i].size() != b[j].size())
                throw Error("cost_matrix: dimension mismatch (" + std::to_string(a[i].size()) + " vs " +
                            std::to_string(b[j].size()) + ")");
            m(i, j) = euclidean_distance(a[i], b[j]);
        }
    }
    return CostMatrix(std::move(m));
}

DiscreteMeasure mix(const DiscreteMeasure& base, const std::vector<DiscreteMeasure>& components,
                    std::span<const double> coeffs) {
    if (coeffs.size() != components.size()) throw Error("mix: one coefficient per component required");
    std::vector<Point> pts = base.points();
    std::vector<double> w = base.weights();
    for (std::size_t k = 0; k < components.size(); ++k) {
        if (coeffs[k] < 0.0) throw Error("mix: negative coefficient");
        const auto& c = components[k];
        if (!c.empty() && !base.empty() && c.dimension() != base.dimension())
            throw Error("mix: component dimension differs from base");
        if (coeffs[k] == 0.0) continue;
        for (std::size_t i = 0; i < c.size(); ++i) {
            pts.push_back(c.point(i));
            w.push_back(coeffs[k] * c.weight(i));
        }
    }
    return {std::move(pts), std::move(w)};
}

DiscreteMeasure merge_duplicates(const DiscreteMeasure& measure) {
    std::map<Point, std::size_t> index;
    std::vector<Point> pts;
    std::vector<double> w;
    for (std::size_t i = 0; i < measure.size(); ++i) {
        auto [it, inserted] = index.emplace(measure.point(i), pts.size());
        if (inserted) {
            pts.push_back(measure.point(i));
            w.push_back(measure.weight(i));
        } else {
            w[it->second] += measure.weight(i);
        }
    }
    return {std::move(pts), std::move(w)};
}

}  // namespace imd
