#include "imd/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

namespace imd {

const char* to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::indicators: return "indicators";
        case FamilyKind::grid: return "grid";
        case FamilyKind::hdh: return "hdh";
        case FamilyKind::lipschitz_lp: return "lipschitz_lp";
    }
    return "unknown";
}

FunctionFamily FunctionFamily::indicators(std::vector<Point> ground) {
    FunctionFamily f;
    f.kind = FamilyKind::indicators;
    f.ground_points = std::move(ground);
    return f;
}

FunctionFamily FunctionFamily::grid(std::vector<Point> ground, double step) {
    if (!(step > 0.0 && step <= 1.0)) throw Error("grid family: step must lie in (0, 1]");
    const double levels = 1.0 / step;
    if (std::abs(levels - std::round(levels)) > 1e-9) throw Error("grid family: 1/step must be an integer");
    FunctionFamily f;
    f.kind = FamilyKind::grid;
    f.ground_points = std::move(ground);
    f.grid_step = step;
    return f;
}

FunctionFamily FunctionFamily::hdh(std::vector<Point> ground, std::vector<Hypothesis> hypotheses) {
    for (const auto& h : hypotheses)
        if (h.size() != ground.size()) throw Error("hdh family: hypothesis length differs from ground set size");
    FunctionFamily f;
    f.kind = FamilyKind::hdh;
    f.ground_points = std::move(ground);
    f.hypotheses = std::move(hypotheses);
    return f;
}

FunctionFamily FunctionFamily::lipschitz(std::vector<Point> ground) {
    FunctionFamily f;
    f.kind = FamilyKind::lipschitz_lp;
    f.ground_points = std::move(ground);
    return f;
}

namespace {

bool same_point(const Point& a, const Point& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t d = 0; d < a.size(); ++d)
        if (std::abs(a[d] - b[d]) > tol) return false;
    return true;
}

}  // namespace

std::vector<double> project_onto(const DiscreteMeasure& measure, const std::vector<Point>& ground, double tol) {
    std::vector<double> w(ground.size(), 0.0);
    for (std::size_t i = 0; i < measure.size(); ++i) {
        if (measure.weight(i) == 0.0) continue;
        bool found = false;
        for (std::size_t g = 0; g < ground.size() && !found; ++g) {
            if (same_point(measure.point(i), ground[g], tol)) {
                w[g] += measure.weight(i);
                found = true;
            }
        }
        if (!found) throw Error("measure atom " + std::to_string(i) + " is not a ground point of the family");
    }
    return w;
}

std::vector<Point> union_support(const std::vector<const DiscreteMeasure*>& measures, double tol) {
    std::vector<Point> out;
    for (const auto* m : measures) {
        for (const auto& p : m->points()) {
            const bool seen = std::any_of(out.begin(), out.end(), [&](const Point& q) { return same_point(p, q, tol); });
            if (!seen) out.push_back(p);
        }
    }
    return out;
}

Localization Localization::none() { return {}; }

Localization Localization::global(double eps, DiscreteMeasure source) {
    if (!(eps >= 0.0)) throw Error("localization: eps must be >= 0");
    Localization l;
    l.mode = Mode::global;
    l.eps = {eps};
    l.reference = {std::move(source)};
    return l;
}

Localization Localization::per_class(std::vector<double> eps, std::vector<DiscreteMeasure> conditionals) {
    if (eps.size() != conditionals.size()) throw Error("localization: one eps per class required");
    for (double e : eps)
        if (!(e >= 0.0)) throw Error("localization: eps must be >= 0");
    Localization l;
    l.mode = Mode::per_class;
    l.eps = std::move(eps);
    l.reference = std::move(conditionals);
    return l;
}

LocalizationFilter::LocalizationFilter(const Localization& loc, const std::vector<Point>& ground, double tol)
    : tol_(tol) {
    if (loc.mode == Localization::Mode::none) return;
    for (const auto& m : loc.reference) weights_.push_back(project_onto(m, ground));
    eps_ = loc.eps;
}

std::vector<double> LocalizationFilter::expectations(std::span<const double> f) const {
    std::vector<double> e(weights_.size(), 0.0);
    for (std::size_t k = 0; k < weights_.size(); ++k)
        for (std::size_t i = 0; i < f.size(); ++i) e[k] += weights_[k][i] * f[i];
    return e;
}

bool LocalizationFilter::admits(std::span<const double> f) const {
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        if (eps_[k] == std::numeric_limits<double>::infinity()) continue;
        double e = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) e += weights_[k][i] * f[i];
        if (e > eps_[k] + tol_) return false;
    }
    return true;
}

FunctionEnumerator::FunctionEnumerator(const FunctionFamily& family, const Localization& loc)
    : family_(family), filter_(loc, family.ground_points), n_(family.size()) {
    switch (family.kind) {
        case FamilyKind::lipschitz_lp:
            throw Error("the Lipschitz family is not enumerable; use the transport LP (lipschitz_imd_dual)");
        case FamilyKind::indicators:
            if (n_ > kMaxIndicatorAtoms)
                throw Error("indicator enumeration is limited to " + std::to_string(kMaxIndicatorAtoms) +
                            " ground points; use the closed form or the LP family");
            levels_ = 2;
            break;
        case FamilyKind::grid: {
            levels_ = static_cast<int>(std::lround(1.0 / family.grid_step)) + 1;
            double count = 1.0;
            for (std::size_t i = 0; i < n_; ++i) count *= levels_;
            if (count > static_cast<double>(kMaxGridFunctions))
                throw Error("grid enumeration would exceed " + std::to_string(kMaxGridFunctions) +
                            " functions; use fewer ground points or a coarser step");
            break;
        }
        case FamilyKind::hdh: {
            const auto& hs = family.hypotheses;
            if (hs.size() > kMaxHypotheses)
                throw Error("hdh enumeration is limited to " + std::to_string(kMaxHypotheses) + " hypotheses");
            std::set<std::vector<double>> seen;
            std::vector<double> null(n_, 0.0);
            seen.insert(null);
            hdh_members_.push_back(null);
            for (std::size_t a = 0; a < hs.size(); ++a) {
                for (std::size_t b = a + 1; b < hs.size(); ++b) {
                    std::vector<double> f(n_);
                    for (std::size_t i = 0; i < n_; ++i) f[i] = hs[a][i] != hs[b][i] ? 1.0 : 0.0;
                    if (seen.insert(f).second) hdh_members_.push_back(std::move(f));
                }
            }
            break;
        }
    }
    digits_.assign(n_, 0);
}

bool FunctionEnumerator::advance(std::vector<double>& f) {
    if (family_.kind == FamilyKind::hdh) {
        if (hdh_pos_ >= hdh_members_.size()) return false;
        f = hdh_members_[hdh_pos_++];
        return true;
    }
    if (!started_) {
        started_ = true;
        f.assign(n_, 0.0);
        return true;
    }
    // little-endian counter over the grid levels
    std::size_t i = 0;
    while (i < n_ && digits_[i] == levels_ - 1) {
        digits_[i] = 0;
        f[i] = 0.0;
        ++i;
    }
    if (i == n_) return false;
    ++digits_[i];
    f[i] = static_cast<double>(digits_[i]) / (levels_ - 1);
    return true;
}

bool FunctionEnumerator::next(std::vector<double>& f) {
    while (advance(f)) {
        ++generated_;
        if (filter_.admits(f)) return true;
    }
    return false;
}

std::vector<std::vector<double>> enumerate(const FunctionFamily& family, const Localization& loc) {
    FunctionEnumerator it(family, loc);
    std::vector<std::vector<double>> out;
    std::vector<double> f;
    while (it.next(f)) out.push_back(f);
    return out;
}

InclusionReport localization_inclusion_check(const FunctionFamily& family, std::span<const double> eps_vec, double eps,
                                             std::span<const double> proportions,
                                             const std::vector<DiscreteMeasure>& conditionals) {
    const std::size_t k = conditionals.size();
    if (eps_vec.size() != k || proportions.size() != k)
        throw Error("inclusion check: eps vector, proportions and conditionals must have one entry per class");
    const DiscreteMeasure source = mix(DiscreteMeasure{}, conditionals, proportions);

    double p_eps = 0.0;
    std::vector<double> eta(k);
    for (std::size_t c = 0; c < k; ++c) {
        p_eps += proportions[c] * eps_vec[c];
        eta[c] = proportions[c] > 0.0 ? eps / proportions[c] : std::numeric_limits<double>::infinity();
    }

    // subset side tested tightly, superset side with slack for rounding
    const auto& g = family.ground_points;
    const LocalizationFilter pc_tight(Localization::per_class({eps_vec.begin(), eps_vec.end()}, conditionals), g, 1e-12);
    const LocalizationFilter gl_loose(Localization::global(p_eps, source), g, 1e-9);
    const LocalizationFilter gl_tight(Localization::global(eps, source), g, 1e-12);
    const LocalizationFilter pc_loose(Localization::per_class(eta, conditionals), g, 1e-9);

    InclusionReport rep;
    FunctionEnumerator it(family);
    std::vector<double> f;
    while (it.next(f)) {
        ++rep.members_checked;
        if (pc_tight.admits(f) && !gl_loose.admits(f) && rep.per_class_in_global) {
            rep.per_class_in_global = false;
            rep.counterexample = f;
            rep.detail = "member admitted per class but rejected by the global bound p.eps";
        }
        if (gl_tight.admits(f) && !pc_loose.admits(f) && rep.global_in_per_class) {
            rep.global_in_per_class = false;
            if (!rep.counterexample) rep.counterexample = f;
            if (rep.detail.empty()) rep.detail = "member admitted globally but rejected by a bound eps/p_k";
        }
    }
    return rep;
}

std::vector<Hypothesis> hypotheses_from_json(const std::string& text) {
    std::vector<Hypothesis> out;
    try {
        const auto j = nlohmann::json::parse(text);
        if (!j.is_array()) throw Error("hypotheses JSON must be an array of label vectors");
        for (const auto& h : j) out.push_back(h.get<Hypothesis>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("hypotheses JSON: ") + e.what());
    }
    if (!out.empty()) {
        for (const auto& h : out)
            if (h.size() != out.front().size()) throw Error("hypotheses JSON: label vectors differ in length");
    }
    return out;
}

}  // namespace imd
