#include <doctest.h>

#include <numeric>
#include <random>

#include "imd/transport.hpp"
#include "oracles.hpp"

using namespace imd;

namespace {

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim = 2) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Point> pts(n, Point(dim));
    for (auto& p : pts)
        for (auto& v : p) v = u(rng);
    return pts;
}

oracle::Dense dense(const CostMatrix& c) {
    oracle::Dense d(c.rows(), std::vector<double>(c.cols()));
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) d[i][j] = c(i, j);
    return d;
}

// Random labeled source with every class present, plus a target measure.
struct Instance {
    DiscreteMeasure target;
    LabeledDataset source;
    ot::PerClassProblem pc;
};

Instance random_instance(std::mt19937_64& rng, std::size_t nt, std::size_t ns, int k) {
    Instance in;
    in.target = DiscreteMeasure(random_points(rng, nt), oracle::random_simplex(rng, nt));
    std::vector<int> labels(ns);
    for (std::size_t j = 0; j < ns; ++j) labels[j] = static_cast<int>(j % static_cast<std::size_t>(k));
    std::shuffle(labels.begin(), labels.end(), rng);
    in.source = LabeledDataset(random_points(rng, ns), labels, k);
    in.pc = ot::per_class_problem(in.target, in.source);
    return in;
}

void check_plan_invariants(const ot::TransportPlanSet& set, const DiscreteMeasure& target,
                           const ot::PerClassProblem& pc) {
    std::vector<double> rows(target.size(), 0.0);
    for (std::size_t k = 0; k < set.plans.size(); ++k) {
        const auto& p = set.plans[k];
        const auto cs = p.col_sums();
        for (std::size_t j = 0; j < p.cols(); ++j)
            CHECK(cs[j] <= (pc.proportions[k] + set.beta[k]) * pc.conditionals[k].weight(j) + 1e-8);
        for (std::size_t i = 0; i < p.rows(); ++i) {
            for (std::size_t j = 0; j < p.cols(); ++j) CHECK(p(i, j) >= -1e-12);
            rows[i] += p.row_sums()[i];
        }
    }
    for (std::size_t i = 0; i < target.size(); ++i) CHECK(std::abs(rows[i] - target.weight(i)) <= 1e-8);
}

}  // namespace

TEST_CASE("wasserstein1 small cases") {
    const DiscreteMeasure a({{0.0, 0.0}}, {1.0});
    const DiscreteMeasure b({{3.0, 4.0}}, {1.0});
    CHECK(ot::wasserstein1(a, b, cost_matrix(a.points(), b.points())).value == doctest::Approx(5.0).epsilon(1e-12));

    std::mt19937_64 rng(1);
    const DiscreteMeasure t(random_points(rng, 4), oracle::random_simplex(rng, 4));
    auto same = ot::wasserstein1(t, t, cost_matrix(t.points(), t.points()));
    CHECK(std::abs(same.value) < 1e-12);

    CHECK_THROWS_AS(ot::wasserstein1(a, b.scaled(2.0), cost_matrix(a.points(), b.points())), Error);
}

TEST_CASE("wasserstein1 on 3x3 matches vertex enumeration") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const DiscreteMeasure t(random_points(rng, 3), oracle::random_simplex(rng, 3));
        const DiscreteMeasure s(random_points(rng, 3), oracle::random_simplex(rng, 3));
        const auto c = cost_matrix(t.points(), s.points());
        const auto res = ot::wasserstein1(t, s, c);
        // equality columns are capacities that must be exhausted when masses match
        const auto ref = oracle::partial_transport_vertices(t.weights(), s.weights(), dense(c));
        REQUIRE(ref);
        CHECK(res.value == doctest::Approx(*ref).epsilon(1e-9));
        const auto rs = res.plan.row_sums(), cs = res.plan.col_sums();
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(std::abs(rs[i] - t.weight(i)) <= 1e-8);
            CHECK(std::abs(cs[i] - s.weight(i)) <= 1e-8);
        }
    }
}

TEST_CASE("global partial transport on two atoms") {
    const DiscreteMeasure t({{0.0}}, {1.0});
    const DiscreteMeasure s({{0.0}, {1.0}}, {0.5, 0.5});
    const auto c = cost_matrix(t.points(), s.points());
    CHECK(ot::partial_ot_global(t, s, c, 0.0).value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(ot::partial_ot_global(t, s, c, 1.0).value) < 1e-12);
    CHECK_THROWS_AS(ot::partial_ot_global(t, s, c, -0.1), Error);
}

TEST_CASE("global partial transport matches vertex enumeration and is monotone") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ub(0.0, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
        const DiscreteMeasure t(random_points(rng, 3), oracle::random_simplex(rng, 3));
        const DiscreteMeasure s(random_points(rng, 3), oracle::random_simplex(rng, 3));
        const auto c = cost_matrix(t.points(), s.points());
        const double beta = ub(rng);
        std::vector<double> cap(s.weights());
        for (double& v : cap) v *= 1.0 + beta;
        const auto ref = oracle::partial_transport_vertices(t.weights(), cap, dense(c));
        REQUIRE(ref);
        const auto res = ot::partial_ot_global(t, s, c, beta);
        CHECK(res.value == doctest::Approx(*ref).epsilon(1e-9));
        CHECK(ot::partial_ot_global(t, s, c, 10.0).value <= ot::partial_ot_global(t, s, c, 0.1).value + 1e-12);
        CHECK(ot::partial_ot_global(t, s, c, 0.0).value ==
              doctest::Approx(ot::wasserstein1(t, s, c).value).epsilon(1e-8));
    }
}

TEST_CASE("label shift on shared atoms") {
    // atoms a (class 1) and b (class 2) at distance 1; p = (0.8, 0.2), q = (0.5, 0.5)
    const DiscreteMeasure target({{0.0}, {1.0}}, {0.5, 0.5});
    const std::vector<DiscreteMeasure> cond{DiscreteMeasure({{0.0}}, {1.0}), DiscreteMeasure({{1.0}}, {1.0})};
    const std::vector<double> p{0.8, 0.2};
    std::vector<CostMatrix> costs;
    for (const auto& m : cond) costs.push_back(cost_matrix(target.points(), m.points()));

    const std::vector<double> at{0.0, 0.3}, below{0.0, 0.29};
    CHECK(std::abs(ot::partial_ot_per_class(target, cond, p, at, costs).objective) < 1e-12);
    CHECK(ot::partial_ot_per_class(target, cond, p, below, costs).objective == doctest::Approx(0.01).epsilon(1e-9));

    const auto split = ot::partial_ot_beta_split(target, cond, p, 0.3, costs);
    CHECK(std::abs(split.objective) < 1e-12);
    CHECK(split.beta[0] + split.beta[1] == doctest::Approx(0.3).epsilon(1e-8));

    const auto src = ot::relaxed_source(cond, p, std::vector<double>{0.0, 0.0});
    const auto c = cost_matrix(target.points(), src.points());
    CHECK(std::abs(ot::partial_ot_global(target, src, c, 1.5).value) < 1e-12);
    CHECK(ot::partial_ot_global(target, src, c, 1.49).value > 1e-6);

    const auto dual = ot::lipschitz_imd_dual(target, ot::relaxed_source(cond, p, below));
    CHECK(dual.value == doctest::Approx(0.01).epsilon(1e-7));
}

TEST_CASE("per-class relaxation structure on random instances") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ub(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const auto in = random_instance(rng, 5, 6, 3);
        const auto& pc = in.pc;
        const auto src = empirical_measure(in.source);
        const auto c = cost_matrix(in.target.points(), src.points());
        const double beta = ub(rng);

        std::vector<double> prop(3);
        for (int k = 0; k < 3; ++k) prop[k] = beta * pc.proportions[k];
        const auto fixed = ot::partial_ot_per_class(in.target, pc.conditionals, pc.proportions, prop, pc.costs);
        check_plan_invariants(fixed, in.target, pc);
        CHECK(fixed.objective ==
              doctest::Approx(ot::partial_ot_global(in.target, src, c, beta).value).epsilon(1e-8));

        const std::vector<double> zero(3, 0.0);
        const auto w1 = ot::wasserstein1(in.target, src, c).value;
        CHECK(ot::partial_ot_per_class(in.target, pc.conditionals, pc.proportions, zero, pc.costs).objective ==
              doctest::Approx(w1).epsilon(1e-8));
        CHECK(ot::partial_ot_beta_split(in.target, pc.conditionals, pc.proportions, 0.0, pc.costs).objective ==
              doctest::Approx(w1).epsilon(1e-8));

        const auto split = ot::partial_ot_beta_split(in.target, pc.conditionals, pc.proportions, beta, pc.costs);
        check_plan_invariants(split, in.target, pc);
        CHECK(std::accumulate(split.beta.begin(), split.beta.end(), 0.0) == doctest::Approx(beta).epsilon(1e-8));
        CHECK(split.objective <= fixed.objective + 1e-8);
        auto lopsided = oracle::random_simplex(rng, 3);
        for (double& v : lopsided) v *= beta;
        CHECK(split.objective <=
              ot::partial_ot_per_class(in.target, pc.conditionals, pc.proportions, lopsided, pc.costs).objective +
                  1e-8);

        // raising one coordinate never increases the value
        auto more = prop;
        more[trial % 3] += 0.2;
        CHECK(ot::partial_ot_per_class(in.target, pc.conditionals, pc.proportions, more, pc.costs).objective <=
              fixed.objective + 1e-8);
        CHECK(ot::partial_ot_beta_split(in.target, pc.conditionals, pc.proportions, beta + 0.2, pc.costs).objective <=
              split.objective + 1e-8);
    }
}

TEST_CASE("primal per-class value equals the Lipschitz dual") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ub(0.0, 0.5);
    for (int trial = 0; trial < 25; ++trial) {
        const auto in = random_instance(rng, 4, 6, 2);
        const std::vector<double> beta{ub(rng), ub(rng)};
        const auto primal =
            ot::partial_ot_per_class(in.target, in.pc.conditionals, in.pc.proportions, beta, in.pc.costs);
        const auto relaxed = ot::relaxed_source(in.pc.conditionals, in.pc.proportions, beta);
        const auto dual = ot::lipschitz_imd_dual(in.target, relaxed);
        CHECK(std::abs(primal.objective - dual.value) <= 1e-6);

        // potential is 1-Lipschitz and nonnegative on the source support
        std::vector<Point> ground = in.target.points();
        ground.insert(ground.end(), relaxed.points().begin(), relaxed.points().end());
        const auto& f = dual.potential.values;
        for (std::size_t a = 0; a < ground.size(); ++a)
            for (std::size_t b = 0; b < ground.size(); ++b)
                CHECK(f[a] - f[b] <= euclidean_distance(ground[a], ground[b]) + 1e-8);
        for (auto a : dual.potential.nonneg_on) CHECK(f[a] >= -1e-10);
    }
}

TEST_CASE("Lipschitz dual of identical measures is zero") {
    std::mt19937_64 rng(6);
    const DiscreteMeasure t(random_points(rng, 5), oracle::random_simplex(rng, 5));
    const auto dual = ot::lipschitz_imd_dual(t, t);
    CHECK(std::abs(dual.value) < 1e-10);
}

TEST_CASE("support distance") {
    const DiscreteMeasure a({{0.0, 0.0}}, {1.0});
    const DiscreteMeasure b({{3.0, 4.0}}, {1.0});
    CHECK(ot::support_distance_imd(a, b) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(ot::support_distance_imd(a, DiscreteMeasure({{0.0, 0.0}, {1.0, 1.0}}, {0.1, 0.9})) == 0.0);
    CHECK_THROWS_AS(ot::support_distance_imd(a, DiscreteMeasure({{1.0, 1.0}}, {0.0})), Error);

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const DiscreteMeasure t(random_points(rng, 4), oracle::random_simplex(rng, 4));
        const DiscreteMeasure s(random_points(rng, 3), oracle::random_simplex(rng, 3));
        const double direct = ot::support_distance_imd(t, s);
        CHECK(std::abs(direct - ot::lipschitz_imd_dual(t, s, true).value) <= 1e-6);
    }
}

TEST_CASE("plan set scatters back to dataset order") {
    ot::TransportPlanSet set;
    set.plans = {Matrix(1, 2, 1.0), Matrix(1, 1, 2.0)};
    set.plans[0](0, 1) = 3.0;
    const auto m = set.to_dataset_order({{2, 0}, {1}}, 3);
    CHECK(m(0, 0) == 3.0);
    CHECK(m(0, 1) == 2.0);
    CHECK(m(0, 2) == 1.0);
    CHECK(set.concatenated().cols() == 3);
}

TEST_CASE("invalid per-class inputs") {
    const DiscreteMeasure t({{0.0}}, {1.0});
    const std::vector<DiscreteMeasure> cond{DiscreteMeasure({{0.0}}, {1.0})};
    const std::vector<CostMatrix> costs{cost_matrix(t.points(), cond[0].points())};
    const std::vector<double> p{1.0};
    CHECK_THROWS_AS(ot::partial_ot_per_class(t, cond, p, std::vector<double>{-0.1}, costs), Error);
    CHECK_THROWS_AS(ot::partial_ot_per_class(t, cond, p, std::vector<double>{0.0, 0.0}, costs), Error);
    CHECK_THROWS_AS(ot::partial_ot_beta_split(t, cond, p, -1.0, costs), Error);
}
