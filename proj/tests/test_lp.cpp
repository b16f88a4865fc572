#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "imd/lp.hpp"
#include "oracles.hpp"

using namespace imd::lp;

TEST_CASE("maximize x subject to x <= 3") {
    LinearProgram lp(Sense::maximize);
    auto x = lp.add_variable(1.0);
    lp.add_constraint({{x, 1.0}}, Relation::less_equal, 3.0);
    auto sol = solve(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.value == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sol.x[x] == doctest::Approx(3.0));
}

TEST_CASE("forced sum x + y = 1") {
    LinearProgram lp;
    auto x = lp.add_variable(1.0);
    auto y = lp.add_variable(1.0);
    lp.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::equal, 1.0);
    auto sol = solve(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("2x2 transport with anti-diagonal cost has value 0") {
    const oracle::Dense cost{{0, 1}, {1, 0}};
    LinearProgram lp;
    std::size_t v[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) v[i][j] = lp.add_variable(cost[i][j]);
    for (int i = 0; i < 2; ++i) lp.add_constraint({{v[i][0], 1.0}, {v[i][1], 1.0}}, Relation::equal, 0.5);
    for (int j = 0; j < 2; ++j) lp.add_constraint({{v[0][j], 1.0}, {v[1][j], 1.0}}, Relation::equal, 0.5);
    auto sol = solve(lp);
    REQUIRE(sol.optimal());
    auto ref = oracle::partial_transport_vertices({0.5, 0.5}, {0.5, 0.5}, cost);
    REQUIRE(ref);
    CHECK(*ref == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(sol.value) < 1e-12);
}

TEST_CASE("infeasible and unbounded are reported") {
    SUBCASE("infeasible") {
        LinearProgram lp;
        auto x = lp.add_variable(1.0);
        lp.add_constraint({{x, 1.0}}, Relation::less_equal, -1.0);
        CHECK(solve(lp).status == Status::infeasible);
    }
    SUBCASE("unbounded") {
        LinearProgram lp(Sense::maximize);
        auto x = lp.add_variable(1.0);
        auto y = lp.add_variable(0.0);
        lp.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::less_equal, 1.0);
        CHECK(solve(lp).status == Status::unbounded);
    }
    SUBCASE("empty row that cannot hold") {
        LinearProgram lp;
        lp.add_variable(1.0);
        lp.add_constraint({}, Relation::greater_equal, 2.0);
        CHECK(solve(lp).status == Status::infeasible);
    }
}

TEST_CASE("free, negative and boxed variables") {
    LinearProgram lp;
    auto f = lp.add_variable(1.0, -kInfinity, kInfinity);
    auto g = lp.add_variable(-1.0, -kInfinity, 2.0);
    auto h = lp.add_variable(-1.0, -1.0, 4.0);
    lp.add_constraint({{f, 1.0}, {g, 1.0}}, Relation::greater_equal, -3.0);
    auto sol = solve(lp);
    REQUIRE(sol.optimal());
    // g at its upper bound 2, f = -5, h at 4
    CHECK(sol.value == doctest::Approx(-5.0 - 2.0 - 4.0));
    CHECK(sol.x[f] == doctest::Approx(-5.0));
    CHECK(sol.x[h] == doctest::Approx(4.0));
}

TEST_CASE("bad programs are rejected at construction") {
    LinearProgram lp;
    CHECK_THROWS_AS(lp.add_variable(1.0, 2.0, 1.0), imd::Error);
    auto x = lp.add_variable(1.0);
    CHECK_THROWS_AS(lp.add_constraint({{x + 1, 1.0}}, Relation::equal, 0.0), imd::Error);
}

namespace {

struct RandomLp {
    oracle::Dense a;
    std::vector<double> b;
    std::vector<double> c;
};

// Bounded random LP in standard form: includes a row sum(x) = s so the
// feasible set is a polytope.
RandomLp make_random(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nv(3, 6), nr(1, 3);
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.1, 1.0);
    RandomLp r;
    const int n = nv(rng);
    const int m = nr(rng);
    std::vector<double> x0(n);
    for (auto& v : x0) v = pos(rng);
    for (int i = 0; i < m; ++i) {
        std::vector<double> row(n);
        for (auto& v : row) v = u(rng);
        double rhs = 0.0;
        for (int j = 0; j < n; ++j) rhs += row[j] * x0[j];
        r.a.push_back(row);
        r.b.push_back(rhs);
    }
    r.a.emplace_back(n, 1.0);
    r.b.push_back(std::accumulate(x0.begin(), x0.end(), 0.0));
    r.c.resize(n);
    for (auto& v : r.c) v = u(rng);
    return r;
}

LinearProgram to_program(const RandomLp& r, const std::vector<std::size_t>& order) {
    LinearProgram lp;
    std::vector<std::size_t> var(r.c.size());
    // order[] permutes the creation order; var maps original -> created index
    for (std::size_t k = 0; k < order.size(); ++k) var[order[k]] = lp.add_variable(r.c[order[k]]);
    for (std::size_t i = 0; i < r.a.size(); ++i) {
        std::vector<Term> t;
        for (std::size_t j = 0; j < r.c.size(); ++j) t.push_back({var[j], r.a[i][j]});
        lp.add_constraint(t, Relation::equal, r.b[i]);
    }
    return lp;
}

}  // namespace

TEST_CASE("random small LPs match vertex enumeration") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto r = make_random(rng);
        std::vector<std::size_t> order(r.c.size());
        std::iota(order.begin(), order.end(), 0);
        auto sol = solve(to_program(r, order));
        auto ref = oracle::min_over_vertices(r.a, r.b, r.c);
        REQUIRE(ref);
        REQUIRE(sol.optimal());
        CHECK(sol.value == doctest::Approx(*ref).epsilon(1e-9));
        CHECK(sol.primal_residual <= 1e-8);
    }
}

TEST_CASE("permuting variable order keeps the optimal value") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto r = make_random(rng);
        std::vector<std::size_t> order(r.c.size());
        std::iota(order.begin(), order.end(), 0);
        auto base = solve(to_program(r, order));
        std::shuffle(order.begin(), order.end(), rng);
        auto perm = solve(to_program(r, order));
        REQUIRE(base.optimal());
        REQUIRE(perm.optimal());
        CHECK(std::abs(base.value - perm.value) <= 1e-9 * (1.0 + std::abs(base.value)));
    }
}

TEST_CASE("strong duality against an explicitly built dual") {
    // primal: min c.x, A x >= b, x >= 0; dual: max b.y, A^T y <= c, y >= 0
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 5, m = 1 + trial % 4;
        oracle::Dense a(m, std::vector<double>(n));
        std::vector<double> b(m), c(n);
        for (auto& row : a)
            for (auto& v : row) v = u(rng);
        for (auto& v : b) v = u(rng);
        for (auto& v : c) v = u(rng);

        LinearProgram primal;
        for (double cj : c) primal.add_variable(cj);
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<Term> t;
            for (std::size_t j = 0; j < n; ++j) t.push_back({j, a[i][j]});
            primal.add_constraint(t, Relation::greater_equal, b[i]);
        }
        LinearProgram dual(Sense::maximize);
        for (double bi : b) dual.add_variable(bi);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<Term> t;
            for (std::size_t i = 0; i < m; ++i) t.push_back({i, a[i][j]});
            dual.add_constraint(t, Relation::less_equal, c[j]);
        }
        auto p = solve(primal);
        auto d = solve(dual);
        REQUIRE(p.optimal());
        REQUIRE(d.optimal());
        CHECK(std::abs(p.value - d.value) <= 1e-7);
        // shadow prices of the primal solve the dual
        double by = 0.0;
        for (std::size_t i = 0; i < m; ++i) by += b[i] * p.duals[i];
        CHECK(by == doctest::Approx(p.value).epsilon(1e-8));
    }
}

TEST_CASE("degenerate transport with redundant equalities") {
    // balanced 4x4 uniform transport: one redundant row, heavy degeneracy
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 4;
        oracle::Dense cost(n, std::vector<double>(n));
        for (auto& row : cost)
            for (auto& v : row) v = std::round(u(rng) * 3.0);  // many ties
        LinearProgram lp;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) lp.add_variable(cost[i][j]);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Term> t;
            for (std::size_t j = 0; j < n; ++j) t.push_back({i * n + j, 1.0});
            lp.add_constraint(t, Relation::equal, 0.25);
        }
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<Term> t;
            for (std::size_t i = 0; i < n; ++i) t.push_back({i * n + j, 1.0});
            lp.add_constraint(t, Relation::equal, 0.25);
        }
        auto sol = solve(lp);
        REQUIRE(sol.optimal());
        // Birkhoff: optimum is a permutation
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = 1e300;
        do {
            double v = 0.0;
            for (std::size_t i = 0; i < n; ++i) v += cost[i][perm[i]] * 0.25;
            best = std::min(best, v);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(sol.value == doctest::Approx(best).epsilon(1e-10));
    }
}

TEST_CASE("text dump lists every variable and row") {
    LinearProgram lp;
    auto x = lp.add_variable(2.0, 0.0, 5.0);
    lp.add_constraint({{x, 1.0}}, Relation::greater_equal, 1.0);
    std::ostringstream os;
    write_text(os, lp);
    const auto s = os.str();
    CHECK(s.find("SENSE MIN") != std::string::npos);
    CHECK(s.find("V 0 2 0 5") != std::string::npos);
    CHECK(s.find("R 0 GE 1 1 0:1") != std::string::npos);
}
