#include "imd/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace imd {

ScoreVector ScoreVector::simplex(std::vector<double> values) {
    if (values.empty()) throw Error("score vector: empty");
    double sum = 0.0;
    for (double v : values) {
        if (!(v >= 0.0)) throw Error("score vector: simplex components must be >= 0");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error("score vector: simplex components must sum to 1");
    ScoreVector s;
    s.convention_ = Convention::simplex;
    s.values_ = std::move(values);
    return s;
}

ScoreVector ScoreVector::margin(double u) {
    if (!std::isfinite(u)) throw Error("score vector: margin must be finite");
    ScoreVector s;
    s.convention_ = Convention::margin;
    s.values_ = {u};
    return s;
}

ScoreVector ScoreVector::softmax(std::span<const double> logits) {
    if (logits.empty()) throw Error("softmax: empty logits");
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> v(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) sum += v[i] = std::exp(logits[i] - top);
    for (double& x : v) x /= sum;
    ScoreVector s;
    s.convention_ = Convention::simplex;
    s.values_ = std::move(v);
    return s;
}

namespace {

const std::vector<double>& simplex_values(const ScoreVector& s, const char* who) {
    if (s.convention() != ScoreVector::Convention::simplex)
        throw Error(std::string(who) + ": needs a simplex score vector");
    return s.values();
}

}  // namespace

double min_entropy_uncertainty(const ScoreVector& score) {
    const auto& v = simplex_values(score, "min_entropy_uncertainty");
    const double top = *std::max_element(v.begin(), v.end());
    if (!(top > 0.0)) throw Error("min_entropy_uncertainty: all components are zero");
    return -std::log(top);
}

double renyi_entropy(const ScoreVector& score, double alpha) {
    const auto& v = simplex_values(score, "renyi_entropy");
    if (!(alpha >= 0.0)) throw Error("renyi_entropy: alpha must be >= 0");
    if (std::isinf(alpha)) return min_entropy_uncertainty(score);
    if (alpha == 1.0) {
        double h = 0.0;
        for (double p : v)
            if (p > 0.0) h -= p * std::log(p);
        return h;
    }
    double s = 0.0;
    for (double p : v) {
        if (alpha == 0.0)
            s += p > 0.0 ? 1.0 : 0.0;
        else if (p > 0.0)
            s += std::pow(p, alpha);
    }
    return std::log(s) / (1.0 - alpha);
}

double hinge_uncertainty(double u) { return std::max(0.0, 1.0 - std::abs(u)); }

double hinge_uncertainty(const ScoreVector& score) {
    if (score.convention() != ScoreVector::Convention::margin)
        throw Error("hinge_uncertainty: needs a margin score");
    return hinge_uncertainty(score.values().front());
}

double Loss::operator()(std::span<const double> u, int y) const {
    if (y < 0 || static_cast<std::size_t>(y) >= u.size()) throw Error("loss: label out of range");
    switch (kind) {
        case LossKind::zero_one: {
            const auto top = std::max_element(u.begin(), u.end()) - u.begin();
            return top == y ? 0.0 : scale;
        }
        case LossKind::cross_entropy:
            return -scale * std::log(std::max(u[static_cast<std::size_t>(y)], 1e-12));
        case LossKind::l1: {
            double d = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) d += std::abs(u[i] - (static_cast<int>(i) == y ? 1.0 : 0.0));
            return scale * d;
        }
    }
    return 0.0;
}

double Loss::hard(int a, int y, int num_classes) const {
    if (a < 0 || a >= num_classes) throw Error("loss: predicted label out of range");
    std::vector<double> e(static_cast<std::size_t>(num_classes), 0.0);
    e[static_cast<std::size_t>(a)] = 1.0;
    return (*this)(e, y);
}

double target_disagreement(const std::vector<std::vector<double>>& g_target, const FiniteHypothesis& h,
                           const Loss& l1) {
    if (g_target.size() != h.target.size()) throw Error("target sample size differs between g and hypothesis");
    if (g_target.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < g_target.size(); ++i) s += l1(g_target[i], h.target[i]);
    return s / static_cast<double>(g_target.size());
}

double source_risk(const FiniteHypothesis& h, std::span<const int> source_labels, const Loss& l2, int num_classes) {
    if (h.source.size() != source_labels.size()) throw Error("source sample size differs between labels and hypothesis");
    if (source_labels.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < source_labels.size(); ++j) s += l2.hard(h.source[j], source_labels[j], num_classes);
    return s / static_cast<double>(source_labels.size());
}

SguResult source_guided_uncertainty(const std::vector<std::vector<double>>& g_target,
                                    const std::vector<FiniteHypothesis>& hypotheses, std::span<const int> source_labels,
                                    int num_classes, const Loss& l1, const Loss& l2) {
    if (hypotheses.empty()) throw Error("source_guided_uncertainty: empty hypothesis list");
    SguResult r;
    r.value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < hypotheses.size(); ++k) {
        const double v = target_disagreement(g_target, hypotheses[k], l1) +
                         source_risk(hypotheses[k], source_labels, l2, num_classes);
        if (v < r.value) {
            r.value = v;
            r.argmin = k;
        }
    }
    return r;
}

std::vector<std::vector<double>> hard_scores(const FiniteHypothesis& h, int num_classes) {
    std::vector<std::vector<double>> out(h.target.size(), std::vector<double>(static_cast<std::size_t>(num_classes), 0.0));
    for (std::size_t i = 0; i < h.target.size(); ++i) {
        if (h.target[i] < 0 || h.target[i] >= num_classes) throw Error("hypothesis label out of range");
        out[i][static_cast<std::size_t>(h.target[i])] = 1.0;
    }
    return out;
}

bool loss_satisfies_triangle(const Loss& loss, int num_classes) {
    for (int a = 0; a < num_classes; ++a)
        for (int b = 0; b < num_classes; ++b)
            for (int c = 0; c < num_classes; ++c)
                if (loss.hard(a, c, num_classes) > loss.hard(a, b, num_classes) + loss.hard(b, c, num_classes) + 1e-12)
                    return false;
    return true;
}

namespace {

bool same_outputs(const FiniteHypothesis& a, const FiniteHypothesis& b) {
    return a.target == b.target && a.source == b.source;
}

}  // namespace

SguPropertyReport verify_sgu_properties(const std::vector<FiniteHypothesis>& h,
                                        const std::vector<FiniteHypothesis>& h_tilde,
                                        std::span<const int> target_labels, std::span<const int> source_labels,
                                        int num_classes, const Loss& loss) {
    if (!loss_satisfies_triangle(loss, num_classes))
        throw Error("verify_sgu_properties: loss violates the triangle inequality on the label set");
    if (h.empty()) throw Error("verify_sgu_properties: empty hypothesis list");
    for (const auto& member : h) {
        const bool found = std::any_of(h_tilde.begin(), h_tilde.end(),
                                       [&](const FiniteHypothesis& g) { return same_outputs(member, g); });
        if (!found) throw Error("verify_sgu_properties: the scorer set must contain every hypothesis");
    }
    const double tol = 1e-12;
    SguPropertyReport rep;

    std::vector<double> rs(h.size()), rt(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        rs[k] = source_risk(h[k], source_labels, loss, num_classes);
        if (h[k].target.size() != target_labels.size()) throw Error("verify_sgu_properties: target size mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < target_labels.size(); ++i) s += loss.hard(h[k].target[i], target_labels[i], num_classes);
        rt[k] = target_labels.empty() ? 0.0 : s / static_cast<double>(target_labels.size());
    }

    // point 1, for every scorer: U(g) <= R_T(g, h_g) + R_S(h_g); for g in H also U(g) <= R_S(g)
    rep.inf_over_scorers = std::numeric_limits<double>::infinity();
    for (const auto& g : h_tilde) {
        const auto scores = hard_scores(g, num_classes);
        const double u = source_guided_uncertainty(scores, h, source_labels, num_classes, loss, loss).value;
        rep.inf_over_scorers = std::min(rep.inf_over_scorers, u);
        std::size_t hg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < h.size(); ++k) {
            const double d = target_disagreement(scores, h[k], loss);
            if (d < best) {
                best = d;
                hg = k;
            }
        }
        if (u > best + rs[hg] + tol) {
            rep.point1 = false;
            rep.detail = "point 1 fails at a scorer";
        }
        for (std::size_t k = 0; k < h.size(); ++k) {
            if (same_outputs(g, h[k]) && u > rs[k] + tol) {
                rep.point1 = false;
                rep.detail = "point 1 fails: U(g) > R_S(g) for g in H";
            }
        }
    }

    // point 2: inf over scorers equals the best source risk (needs l(a, a) = 0)
    rep.inf_source_risk = *std::min_element(rs.begin(), rs.end());
    rep.h_source = static_cast<std::size_t>(std::min_element(rs.begin(), rs.end()) - rs.begin());
    if (std::abs(rep.inf_over_scorers - rep.inf_source_risk) > tol) {
        rep.point2 = false;
        if (rep.detail.empty()) rep.detail = "point 2 fails";
    }

    // point 3: U(h) = R_S(h) at h_S and at h* = argmin R_T + R_S
    double best_joint = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (rt[k] + rs[k] < best_joint) {
            best_joint = rt[k] + rs[k];
            rep.h_star = k;
        }
    }
    for (const std::size_t k : {rep.h_source, rep.h_star}) {
        const double u = source_guided_uncertainty(hard_scores(h[k], num_classes), h, source_labels, num_classes, loss,
                                                   loss)
                             .value;
        if (std::abs(u - rs[k]) > tol) {
            rep.point3 = false;
            if (rep.detail.empty()) rep.detail = "point 3 fails";
        }
    }
    return rep;
}

double cross_entropy_l1_scale(double logit_bound, int num_classes) {
    if (!(logit_bound >= 0.0) || num_classes < 1) throw Error("cross_entropy_l1_scale: need R >= 0 and K >= 1");
    return 2.0 * logit_bound + std::log(static_cast<double>(num_classes));
}

bool cross_entropy_l1_condition(std::span<const double> logits, double logit_bound) {
    for (double a : logits)
        if (std::abs(a) > logit_bound) return false;
    const int k = static_cast<int>(logits.size());
    const auto u = ScoreVector::softmax(logits);
    const Loss ce{LossKind::cross_entropy, 1.0};
    const Loss l2{LossKind::l1, cross_entropy_l1_scale(logit_bound, k)};
    for (int y1 = 0; y1 < k; ++y1)
        for (int y2 = 0; y2 < k; ++y2)
            if (ce(u.values(), y1) - l2.hard(y2, y1, k) > ce(u.values(), y2) + 1e-12) return false;
    return true;
}

}  // namespace imd
