#include "imd/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "imd/datagen.hpp"
#include "imd/discrepancy.hpp"
#include "imd/transport.hpp"
#include "imd/uncertainty.hpp"

namespace imd {

namespace {

class Entry {
  public:
    Entry(std::vector<CheckEntry>& out, std::string suite, std::string name) : out_(out), slot_(out.size()) {
        e_.suite = std::move(suite);
        e_.name = std::move(name);
        out_.push_back(e_);
    }
    ~Entry() { out_[slot_] = e_; }
    Entry(const Entry&) = delete;
    Entry& operator=(const Entry&) = delete;

    /// Records a violation amount; positive above tol fails the entry.
    void violation(double v, double tol, const std::string& what = {}) {
        ++e_.instances;
        e_.worst = std::max(e_.worst, v);
        if (!(v <= tol)) {
            if (e_.passed) e_.detail = what.empty() ? "violation " + std::to_string(v) : what;
            e_.passed = false;
        }
    }
    void expect(bool ok, const std::string& what) { violation(ok ? 0.0 : 1.0, 0.0, what); }

  private:
    std::vector<CheckEntry>& out_;
    std::size_t slot_;
    CheckEntry e_;
};

std::vector<Point> line(std::size_t n) {
    std::vector<Point> g;
    for (std::size_t i = 0; i < n; ++i) g.push_back({static_cast<double>(i)});
    return g;
}

std::vector<double> weights(Rng& rng, std::size_t n, double zero_prob = 0.25, double scale = 1.0) {
    std::vector<double> w(n);
    for (auto& v : w) v = rng.uniform() < zero_prob ? 0.0 : scale * rng.uniform();
    return w;
}

std::vector<double> simplex(Rng& rng, std::size_t n) {
    std::vector<double> w(n);
    for (auto& v : w) v = -std::log(1.0 - rng.uniform());
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= s;
    return w;
}

std::vector<Point> plane(Rng& rng, std::size_t n) {
    std::vector<Point> p(n);
    for (auto& x : p) x = {4.0 * rng.uniform(), 4.0 * rng.uniform()};
    return p;
}

int label(Rng& rng, int k) { return std::min(k - 1, static_cast<int>(rng.uniform() * k)); }

void imd_suite(std::vector<CheckEntry>& out, std::uint64_t seed) {
    Rng rng(seed);
    const auto g = line(5);
    const auto fam = FunctionFamily::indicators(g);
    {
        Entry nonneg(out, "imd", "nonnegativity");
        Entry tri(out, "imd", "triangle_inequality");
        Entry null(out, "imd", "null_characterization");
        Entry tv(out, "imd", "tv_closed_form_exact");
        for (int i = 0; i < 200; ++i) {
            const DiscreteMeasure a(g, weights(rng, 5)), b(g, weights(rng, 5)), c(g, weights(rng, 5));
            const double ab = imd_bruteforce(a, b, fam).value;
            const double bc = imd_bruteforce(b, c, fam).value;
            const double ac = imd_bruteforce(a, c, fam).value;
            nonneg.violation(-ab, 0.0);
            tri.violation(ac - ab - bc, 1e-12);
            bool dominated = true;
            for (std::size_t j = 0; j < 5; ++j) dominated = dominated && a.weight(j) <= b.weight(j);
            null.expect((ab == 0.0) == dominated, "IMD = 0 disagrees with componentwise domination");
            tv.expect(imd_tv_closed_form(a, b) == ab, "closed form differs from the indicator scan");
        }
    }
    {
        Entry asym(out, "imd", "asymmetry_witness");
        for (int i = 0; i < 50; ++i) {
            const DiscreteMeasure q(g, simplex(rng, 5));
            const double up = imd_bruteforce(q, q.scaled(2.0), fam).value;
            const double down = imd_bruteforce(q.scaled(2.0), q, fam).value;
            asym.expect(up == 0.0 && down > 0.0, "IMD(Q,2Q) = 0 < IMD(2Q,Q) fails");
        }
    }
    {
        Entry eq(out, "imd", "hdh_matches_bruteforce");
        for (int i = 0; i < 100; ++i) {
            std::vector<Hypothesis> hs(3, Hypothesis(5));
            for (auto& h : hs)
                for (auto& v : h) v = 1 + label(rng, 3);
            const DiscreteMeasure t(g, simplex(rng, 5)), s(g, simplex(rng, 5));
            const double beta = rng.uniform();
            const auto r = hdh_imd(t, s, g, hs, beta);
            const auto b = imd_bruteforce(t, s.scaled(1.0 + beta), FunctionFamily::hdh(g, hs));
            eq.violation(std::abs(r.imd.value - b.value), 1e-12);
            eq.expect(r.identity_holds, "risk identity fails");
        }
    }
    {
        Entry dual(out, "imd", "duality_inequality");
        Entry gap(out, "imd", "duality_grid_gap");
        const auto alphas = alpha_grid(5.0, 0.05);
        for (int i = 0; i < 30; ++i) {
            const DiscreteMeasure t(g, simplex(rng, 5)), s(g, simplex(rng, 5));
            const double eps = 0.05 + 0.3 * rng.uniform();
            const auto ind = duality_check(t, s, FunctionFamily::indicators(g), eps, alphas);
            dual.violation(ind.worst_violation, 1e-12);
            const auto gr = duality_check(t, s, FunctionFamily::grid(g), eps, alphas);
            dual.violation(gr.worst_violation, 1e-12);
            gap.violation(gr.gap, 1e-3);
        }
    }
    {
        Entry inc(out, "imd", "localization_inclusions");
        Entry sup(out, "imd", "hdh_support_bound");
        const auto g6 = line(6);
        for (int i = 0; i < 100; ++i) {
            std::vector<DiscreteMeasure> cond{DiscreteMeasure(g6, simplex(rng, 6)), DiscreteMeasure(g6, simplex(rng, 6))};
            const auto p = simplex(rng, 2);
            const std::vector<double> eps_vec{0.5 * rng.uniform(), 0.5 * rng.uniform()};
            const auto rep = localization_inclusion_check(FunctionFamily::indicators(g6), eps_vec, 0.3 * rng.uniform(),
                                                          p, cond);
            inc.expect(rep.holds(), rep.detail);

            std::vector<Hypothesis> hs(4, Hypothesis(6));
            for (auto& h : hs)
                for (auto& v : h) v = 1 + label(rng, 2);
            auto sw = weights(rng, 6, 0.4);
            if (std::accumulate(sw.begin(), sw.end(), 0.0) == 0.0) sw[0] = 1.0;
            const auto b = hdh_support_bound_check(DiscreteMeasure(g6, simplex(rng, 6)), DiscreteMeasure(g6, sw), g6, hs);
            sup.violation(b.lhs - b.rhs, 1e-12);
        }
    }
}

struct LabeledInstance {
    DiscreteMeasure target;
    LabeledDataset source;
    ot::PerClassProblem pc;
};

LabeledInstance labeled_instance(Rng& rng, std::size_t nt, std::size_t ns, int k) {
    LabeledInstance in;
    in.target = DiscreteMeasure(plane(rng, nt), simplex(rng, nt));
    std::vector<int> ys(ns);
    for (std::size_t j = 0; j < ns; ++j) ys[j] = j < static_cast<std::size_t>(k) ? static_cast<int>(j) : label(rng, k);
    in.source = LabeledDataset(plane(rng, ns), ys, k);
    in.pc = ot::per_class_problem(in.target, in.source);
    return in;
}

void ot_suite(std::vector<CheckEntry>& out, std::uint64_t seed) {
    Rng rng(seed + 1000);
    Entry pd(out, "ot", "primal_dual_gap");
    Entry prop(out, "ot", "proportional_split_equals_global");
    Entry w1(out, "ot", "beta_zero_equals_w1");
    Entry split(out, "ot", "split_below_fixed");
    Entry mono(out, "ot", "monotone_in_beta");
    Entry supp(out, "ot", "support_distance_identity");
    for (int i = 0; i < 100; ++i) {
        const int k = 2 + i % 2;
        const auto in = labeled_instance(rng, 4, 6, k);
        const auto& pc = in.pc;
        const auto src = empirical_measure(in.source);
        const auto cost = cost_matrix(in.target.points(), src.points());
        const double beta = rng.uniform();

        std::vector<double> fixed(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c) fixed[static_cast<std::size_t>(c)] = beta * pc.proportions[static_cast<std::size_t>(c)];
        const auto per = ot::partial_ot_per_class(in.target, pc.conditionals, pc.proportions, fixed, pc.costs);
        const auto dual = ot::lipschitz_imd_dual(in.target, ot::relaxed_source(pc.conditionals, pc.proportions, fixed));
        pd.violation(std::abs(per.objective - dual.value), 1e-6);

        const double glob = ot::partial_ot_global(in.target, src, cost, beta).value;
        prop.violation(std::abs(per.objective - glob), 1e-8);

        const double w = ot::wasserstein1(in.target, src, cost).value;
        w1.violation(std::abs(ot::partial_ot_global(in.target, src, cost, 0.0).value - w), 1e-8);
        w1.violation(std::abs(ot::partial_ot_beta_split(in.target, pc.conditionals, pc.proportions, 0.0, pc.costs).objective - w),
                     1e-8);

        const auto sp = ot::partial_ot_beta_split(in.target, pc.conditionals, pc.proportions, beta, pc.costs);
        split.violation(sp.objective - per.objective, 1e-8);

        mono.violation(ot::partial_ot_global(in.target, src, cost, beta + 0.25).value - glob, 1e-8);
        mono.violation(
            ot::partial_ot_beta_split(in.target, pc.conditionals, pc.proportions, beta + 0.25, pc.costs).objective -
                sp.objective,
            1e-8);

        const DiscreteMeasure t(plane(rng, 4), simplex(rng, 4));
        const DiscreteMeasure s(plane(rng, 3), simplex(rng, 3));
        supp.violation(std::abs(ot::support_distance_imd(t, s) - ot::lipschitz_imd_dual(t, s, true).value), 1e-6);
    }
}

std::vector<int> labels(Rng& rng, std::size_t n, int k) {
    std::vector<int> v(n);
    for (auto& x : v) x = label(rng, k);
    return v;
}

void uncertainty_suite(std::vector<CheckEntry>& out, std::uint64_t seed) {
    Rng rng(seed + 2000);
    {
        Entry ent(out, "uncertainty", "min_entropy_below_renyi");
        for (int i = 0; i < 10000; ++i) {
            const auto s = ScoreVector::simplex(simplex(rng, 2 + static_cast<std::size_t>(i % 6)));
            const double hinf = min_entropy_uncertainty(s);
            ent.violation(hinf - renyi_entropy(s, 1.0), 1e-12);
            ent.violation(hinf - renyi_entropy(s, 1.0 + 9.0 * rng.uniform()), 1e-12);
        }
    }
    {
        Entry p1(out, "uncertainty", "sgu_point1");
        Entry p2(out, "uncertainty", "sgu_point2");
        Entry p3(out, "uncertainty", "sgu_point3");
        const int k = 3;
        for (int i = 0; i < 60; ++i) {
            const auto yt = labels(rng, 6, k), ys = labels(rng, 6, k);
            std::vector<FiniteHypothesis> h;
            for (int j = 0; j < 4; ++j) h.push_back({labels(rng, 6, k), labels(rng, 6, k)});
            auto ht = h;
            for (int j = 0; j < 3; ++j) ht.push_back({labels(rng, 6, k), labels(rng, 6, k)});
            const auto rep = verify_sgu_properties(h, ht, yt, ys, k, Loss{LossKind::zero_one});
            p1.expect(rep.point1, rep.detail);
            p2.expect(rep.point2, rep.detail);
            p3.expect(rep.point3, rep.detail);
        }
    }
    {
        Entry ce(out, "uncertainty", "cross_entropy_l1_condition");
        for (int i = 0; i < 500; ++i) {
            const double r = 0.5 + 2.0 * rng.uniform();
            std::vector<double> logits(2 + static_cast<std::size_t>(i % 4));
            for (auto& a : logits) a = r * (2.0 * rng.uniform() - 1.0);
            ce.expect(cross_entropy_l1_condition(logits, r), "condition fails inside the logit bound");
        }
    }
}

}  // namespace

std::vector<CheckEntry> run_check_suite(const std::string& suite, std::uint64_t seed) {
    std::vector<CheckEntry> out;
    const bool all = suite == "all";
    if (!all && suite != "imd" && suite != "ot" && suite != "uncertainty")
        throw Error("unknown check suite '" + suite + "'");
    auto guarded = [&](const char* name, auto fn) {
        try {
            fn(out, seed);
        } catch (const std::exception& e) {
            out.push_back({name, "suite_error", false, 0, 0.0, e.what()});
        }
    };
    if (all || suite == "imd") guarded("imd", imd_suite);
    if (all || suite == "ot") guarded("ot", ot_suite);
    if (all || suite == "uncertainty") guarded("uncertainty", uncertainty_suite);
    return out;
}

}  // namespace imd
