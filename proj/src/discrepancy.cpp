#include "imd/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imd {

namespace {

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Sum of f_i (q1_i - q2_i) in index order; the TV closed form adds the same
// terms in the same order, so the two agree bit for bit on indicators.
double integral_gap(std::span<const double> f, std::span<const double> diff) {
    double v = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] != 0.0) v += f[i] * diff[i];
    return v;
}

bool matches_any(const Point& p, const DiscreteMeasure& m, double tol) {
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (m.weight(j) <= 0.0) continue;
        const auto& q = m.point(j);
        if (q.size() != p.size()) continue;
        bool same = true;
        for (std::size_t d = 0; d < p.size() && same; ++d) same = std::abs(p[d] - q[d]) <= tol;
        if (same) return true;
    }
    return false;
}

}  // namespace

ImdResult imd_bruteforce(std::span<const double> q1, std::span<const double> q2, const FunctionFamily& family,
                         const Localization& loc) {
    const std::size_t n = family.size();
    if (q1.size() != n || q2.size() != n) throw Error("imd_bruteforce: weight vectors must match the ground set");
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = q1[i] - q2[i];

    FunctionEnumerator it(family, loc);
    ImdResult res;
    bool any = false;
    std::vector<double> f;
    while (it.next(f)) {
        const double v = integral_gap(f, diff);
        if (!any || v > res.value || (v == res.value && lex_less(f, res.argmax))) {
            res.value = v;
            res.argmax = f;
            any = true;
        }
    }
    res.family_size_scanned = it.generated();
    return res;
}

ImdResult imd_bruteforce(const DiscreteMeasure& q1, const DiscreteMeasure& q2, const FunctionFamily& family,
                         const Localization& loc) {
    const auto w1 = project_onto(q1, family.ground_points);
    const auto w2 = project_onto(q2, family.ground_points);
    return imd_bruteforce(w1, w2, family, loc);
}

double imd_tv_closed_form(const DiscreteMeasure& q1, const DiscreteMeasure& q2) {
    const auto ground = union_support({&q1, &q2});
    const auto w1 = project_onto(q1, ground);
    const auto w2 = project_onto(q2, ground);
    double v = 0.0;
    for (std::size_t i = 0; i < ground.size(); ++i) {
        const double d = w1[i] - w2[i];
        if (d > 0.0) v += d;
    }
    return v;
}

double imd_f0_support_mass(const DiscreteMeasure& target, const DiscreteMeasure& source, double tol) {
    double v = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i)
        if (!matches_any(target.point(i), source, tol)) v += target.weight(i);
    return v;
}

std::vector<double> alpha_grid(double max, double step) {
    if (!(step > 0.0) || !(max >= 0.0)) throw Error("alpha_grid: need step > 0 and max >= 0");
    std::vector<double> g;
    const auto count = static_cast<std::size_t>(std::floor(max / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) g.push_back(static_cast<double>(k) * step);
    return g;
}

DualityReport duality_check(const DiscreteMeasure& target, const DiscreteMeasure& source, const FunctionFamily& family,
                            double eps, std::span<const double> alpha_grid_in) {
    if (!(eps >= 0.0)) throw Error("duality_check: eps must be >= 0");
    if (alpha_grid_in.empty()) throw Error("duality_check: empty alpha grid");
    for (double a : alpha_grid_in)
        if (!(a >= 0.0)) throw Error("duality_check: alpha values must be >= 0");

    const auto t = project_onto(target, family.ground_points);
    const auto s = project_onto(source, family.ground_points);
    const std::size_t n = t.size();

    // (E_T f, E_S f) for every member; the dual side is a max of lines in alpha
    std::vector<std::pair<double, double>> lines;
    DualityReport rep;
    bool any = false;
    {
        FunctionEnumerator it(family);
        std::vector<double> f;
        while (it.next(f)) {
            double a = 0.0, b = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                a += f[i] * t[i];
                b += f[i] * s[i];
            }
            lines.emplace_back(a, b);
            if (b <= eps + 1e-12) {
                const double v = a - b;
                if (!any || v > rep.localized_value) rep.localized_value = v;
                any = true;
            }
        }
    }
    auto dual = [&](double alpha) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& [a, b] : lines) best = std::max(best, a - (1.0 + alpha) * b);
        return best + eps * alpha;
    };

    if (family.kind == FamilyKind::indicators || family.kind == FamilyKind::grid) {
        // fractional knapsack over [0,1]^n: free atoms first, then by ratio
        double v = 0.0, budget = eps;
        std::vector<std::pair<double, std::size_t>> items;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = t[i] - s[i];
            if (d <= 0.0) continue;
            if (s[i] == 0.0)
                v += d;
            else
                items.emplace_back(d / s[i], i);
        }
        std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
        for (const auto& [ratio, i] : items) {
            const double take = std::min(1.0, budget / s[i]);
            if (take <= 0.0) break;
            v += take * (t[i] - s[i]);
            budget -= take * s[i];
        }
        rep.hull_localized_value = v;
    } else {
        rep.hull_localized_value = std::numeric_limits<double>::quiet_NaN();
    }

    rep.alpha_grid.assign(alpha_grid_in.begin(), alpha_grid_in.end());
    std::size_t best = 0;
    for (std::size_t k = 0; k < rep.alpha_grid.size(); ++k) {
        const double v = dual(rep.alpha_grid[k]);
        rep.dual_values.push_back(v);
        const double violation = rep.localized_value - v;
        if (violation > 1e-12) {
            rep.inequality_holds = false;
            rep.worst_violation = std::max(rep.worst_violation, violation);
        }
        if (v < rep.dual_values[best]) best = k;
    }
    rep.grid_min = rep.dual_values[best];
    rep.grid_alpha = rep.alpha_grid[best];

    // the dual is convex in alpha: bracket the best grid point and refine
    std::vector<double> sorted(rep.alpha_grid);
    std::sort(sorted.begin(), sorted.end());
    const auto pos = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), rep.grid_alpha) - sorted.begin());
    double lo = pos > 0 ? sorted[pos - 1] : sorted[pos];
    double hi = pos + 1 < sorted.size() ? sorted[pos + 1] : sorted[pos];
    if (pos + 1 == sorted.size()) {
        hi = std::max(1.0, 2.0 * sorted[pos]);
        while (hi < 1e6 && dual(hi) < dual(hi / 2.0)) hi *= 2.0;
    }
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = dual(x1), f2 = dual(x2);
    for (int iter = 0; iter < 200 && hi - lo > 1e-13 * (1.0 + hi); ++iter) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = dual(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = dual(x2);
        }
    }
    rep.refined_min = rep.grid_min;
    rep.refined_alpha = rep.grid_alpha;
    for (const double a : {lo, hi, 0.5 * (lo + hi)}) {
        const double v = dual(a);
        if (v < rep.refined_min) {
            rep.refined_min = v;
            rep.refined_alpha = a;
        }
    }
    const double reference = std::isnan(rep.hull_localized_value) ? rep.localized_value : rep.hull_localized_value;
    rep.gap = rep.refined_min - reference;
    return rep;
}

namespace {

// Direct scan over hypothesis pairs (a == b gives the null function).
HdhResult hdh_core(std::span<const double> t, std::span<const double> w, const std::vector<Point>& ground,
                   const std::vector<Hypothesis>& hypotheses) {
    const auto family = FunctionFamily::hdh(ground, hypotheses);  // validates lengths
    if (hypotheses.size() > kMaxHypotheses)
        throw Error("hdh_imd: at most " + std::to_string(kMaxHypotheses) + " hypotheses");
    const std::size_t n = ground.size();
    HdhResult out;
    out.imd.value = 0.0;
    out.imd.argmax.assign(n, 0.0);
    out.risk_form = 0.0;
    for (std::size_t i = 0; i < n; ++i) out.risk_form += t[i];
    out.imd.family_size_scanned = 1;
    std::vector<double> f(n);
    for (std::size_t a = 0; a < hypotheses.size(); ++a) {
        for (std::size_t b = a + 1; b < hypotheses.size(); ++b) {
            double pt = 0.0, pw = 0.0, risk = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool differ = hypotheses[a][i] != hypotheses[b][i];
                f[i] = differ ? 1.0 : 0.0;
                if (differ) {
                    pt += t[i];
                    pw += w[i];
                    risk += w[i];
                } else {
                    risk += t[i];
                }
            }
            ++out.imd.family_size_scanned;
            const double v = pt - pw;
            if (v > out.imd.value || (v == out.imd.value && lex_less(f, out.imd.argmax))) {
                out.imd.value = v;
                out.imd.argmax = f;
            }
            out.risk_form = std::min(out.risk_form, risk);
        }
    }
    out.identity_holds = std::abs(1.0 - out.imd.value - out.risk_form) <= 1e-12;
    return out;
}

}  // namespace

HdhResult hdh_imd(const DiscreteMeasure& target, const DiscreteMeasure& source, const std::vector<Point>& ground,
                  const std::vector<Hypothesis>& hypotheses, double beta) {
    if (!(beta >= 0.0)) throw Error("hdh_imd: beta must be >= 0");
    const auto t = project_onto(target, ground);
    auto w = project_onto(source, ground);
    for (double& v : w) v *= 1.0 + beta;
    return hdh_core(t, w, ground, hypotheses);
}

HdhResult hdh_imd(const DiscreteMeasure& target, const std::vector<DiscreteMeasure>& conditionals,
                  std::span<const double> proportions, std::span<const double> beta, const std::vector<Point>& ground,
                  const std::vector<Hypothesis>& hypotheses) {
    if (proportions.size() != conditionals.size() || beta.size() != conditionals.size())
        throw Error("hdh_imd: one proportion and one beta per class required");
    std::vector<double> coef(conditionals.size());
    for (std::size_t k = 0; k < coef.size(); ++k) {
        if (!(beta[k] >= 0.0)) throw Error("hdh_imd: beta must be >= 0");
        coef[k] = proportions[k] + beta[k];
    }
    const auto t = project_onto(target, ground);
    std::vector<double> w(ground.size(), 0.0);
    for (std::size_t k = 0; k < conditionals.size(); ++k) {
        const auto wk = project_onto(conditionals[k], ground);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += coef[k] * wk[i];
    }
    return hdh_core(t, w, ground, hypotheses);
}

SupportBoundReport hdh_support_bound_check(const DiscreteMeasure& target, const DiscreteMeasure& source,
                                           const std::vector<Point>& ground,
                                           const std::vector<Hypothesis>& hypotheses) {
    const auto family = FunctionFamily::hdh(ground, hypotheses);
    const auto t = project_onto(target, ground);
    const auto s = project_onto(source, ground);
    SupportBoundReport rep;
    rep.lhs = imd_bruteforce(t, s, family, Localization::global(0.0, source)).value;

    rep.support.assign(ground.size(), true);
    for (std::size_t a = 0; a < hypotheses.size(); ++a) {
        for (std::size_t b = a + 1; b < hypotheses.size(); ++b) {
            const auto& ha = hypotheses[a];
            const auto& hb = hypotheses[b];
            bool agree_on_s = true;
            for (std::size_t i = 0; i < ground.size() && agree_on_s; ++i)
                if (s[i] > 0.0 && ha[i] != hb[i]) agree_on_s = false;
            if (!agree_on_s) continue;
            for (std::size_t i = 0; i < ground.size(); ++i)
                if (ha[i] != hb[i]) rep.support[i] = false;
        }
    }
    double inside = 0.0;
    for (std::size_t i = 0; i < ground.size(); ++i)
        if (rep.support[i]) inside += t[i];
    rep.rhs = 1.0 - inside;
    rep.holds = rep.lhs <= rep.rhs + 1e-12;
    return rep;
}

}  // namespace imd
