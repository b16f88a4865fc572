#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "imd/error.hpp"

namespace imd {

class ScoreVector {
  public:
    enum class Convention { simplex, margin };

    /// Probability vector; components >= 0 summing to 1 within 1e-12.
    static ScoreVector simplex(std::vector<double> values);
    /// Scalar binary margin.
    static ScoreVector margin(double u);
    /// Softmax of a logit vector.
    static ScoreVector softmax(std::span<const double> logits);

    Convention convention() const { return convention_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

  private:
    Convention convention_ = Convention::simplex;
    std::vector<double> values_;
};

/// -log max_i g_i.
double min_entropy_uncertainty(const ScoreVector& score);

/// Renyi entropy; alpha = 1 gives Shannon, alpha = infinity the min-entropy.
double renyi_entropy(const ScoreVector& score, double alpha);

/// (1 - |u|)_+.
double hinge_uncertainty(double u);
double hinge_uncertainty(const ScoreVector& score);

enum class LossKind { zero_one, cross_entropy, l1 };

/// l(u, y) for a score vector u and a 0-based label y, times scale.
struct Loss {
    LossKind kind = LossKind::zero_one;
    double scale = 1.0;

    double operator()(std::span<const double> u, int y) const;
    /// l(e_a, y): the loss of a hard prediction a.
    double hard(int a, int y, int num_classes) const;
};

/// Labels a hypothesis assigns to the target and source samples (0-based).
struct FiniteHypothesis {
    std::vector<int> target;
    std::vector<int> source;
};

struct SguResult {
    double value = 0.0;
    /// Index of the minimizing hypothesis; ties go to the smallest index.
    std::size_t argmin = 0;
};

/// Empirical risks over uniform samples.
double target_disagreement(const std::vector<std::vector<double>>& g_target, const FiniteHypothesis& h,
                           const Loss& l1);
double source_risk(const FiniteHypothesis& h, std::span<const int> source_labels, const Loss& l2, int num_classes);

/// inf over h of R1_T(g, h) + R2_S(h), scanning the list.
SguResult source_guided_uncertainty(const std::vector<std::vector<double>>& g_target,
                                    const std::vector<FiniteHypothesis>& hypotheses, std::span<const int> source_labels,
                                    int num_classes, const Loss& l1, const Loss& l2);

/// One-hot scores of a hypothesis on the target sample.
std::vector<std::vector<double>> hard_scores(const FiniteHypothesis& h, int num_classes);

/// l(e_a, c) <= l(e_a, b) + l(e_b, c) for all labels.
bool loss_satisfies_triangle(const Loss& loss, int num_classes);

struct SguPropertyReport {
    bool point1 = true;
    bool point2 = true;
    bool point3 = true;
    double inf_over_scorers = 0.0;
    double inf_source_risk = 0.0;
    std::size_t h_source = 0;
    std::size_t h_star = 0;
    std::string detail;

    bool holds() const { return point1 && point2 && point3; }
};

/// Scorers range over h_tilde (which must contain every member of h).
/// Throws if the loss violates the triangle inequality on the label set.
SguPropertyReport verify_sgu_properties(const std::vector<FiniteHypothesis>& h,
                                        const std::vector<FiniteHypothesis>& h_tilde,
                                        std::span<const int> target_labels, std::span<const int> source_labels,
                                        int num_classes, const Loss& loss);

/// Multiplier of the L1 loss that pairs with the cross-entropy when every
/// logit lies in [-R, R].
double cross_entropy_l1_scale(double logit_bound, int num_classes);

/// Checks l1(u, y1) - l2(e_y2, y1) <= l1(u, y2) for all label pairs, with
/// l1 the cross-entropy on softmax(logits) and l2 the scaled L1 loss. False
/// if a logit exceeds the bound.
bool cross_entropy_l1_condition(std::span<const double> logits, double logit_bound);

}  // namespace imd
