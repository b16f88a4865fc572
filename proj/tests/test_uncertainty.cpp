#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "imd/uncertainty.hpp"
#include "oracles.hpp"

using namespace imd;

TEST_CASE("min-entropy and Renyi examples") {
    CHECK(min_entropy_uncertainty(ScoreVector::simplex({1.0, 0.0, 0.0})) == 0.0);
    const auto uni = ScoreVector::simplex({0.25, 0.25, 0.25, 0.25});
    CHECK(min_entropy_uncertainty(uni) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    const auto v = ScoreVector::simplex({0.7, 0.3});
    CHECK(min_entropy_uncertainty(v) == doctest::Approx(0.356675).epsilon(1e-6));
    CHECK(renyi_entropy(v, 2.0) == doctest::Approx(0.544727).epsilon(1e-6));
    for (double a : {0.0, 0.5, 1.0, 2.0, 7.0}) CHECK(renyi_entropy(uni, a) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(renyi_entropy(v, std::numeric_limits<double>::infinity()) == min_entropy_uncertainty(v));
    CHECK(renyi_entropy(v, 1.0) == doctest::Approx(-(0.7 * std::log(0.7) + 0.3 * std::log(0.3))));

    CHECK_THROWS_AS(ScoreVector::simplex({0.5, 0.4}), Error);
    CHECK_THROWS_AS(ScoreVector::simplex({1.5, -0.5}), Error);
    CHECK_THROWS_AS(min_entropy_uncertainty(ScoreVector::margin(0.2)), Error);
}

TEST_CASE("min-entropy lower-bounds Renyi for alpha >= 1") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ua(1.0, 10.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto s = ScoreVector::simplex(oracle::random_simplex(rng, 2 + trial % 5));
        const double hinf = min_entropy_uncertainty(s);
        CHECK(hinf <= renyi_entropy(s, 1.0) + 1e-12);
        CHECK(hinf <= renyi_entropy(s, ua(rng)) + 1e-12);
    }
}

TEST_CASE("hinge uncertainty") {
    CHECK(hinge_uncertainty(1.5) == 0.0);
    CHECK(hinge_uncertainty(0.0) == 1.0);
    CHECK(hinge_uncertainty(0.4) == doctest::Approx(0.6));
    CHECK(hinge_uncertainty(ScoreVector::margin(-0.4)) == doctest::Approx(0.6));
}

TEST_CASE("losses") {
    const std::vector<double> u{0.7, 0.2, 0.1};
    CHECK(Loss{LossKind::zero_one}(u, 0) == 0.0);
    CHECK(Loss{LossKind::zero_one}(u, 2) == 1.0);
    CHECK(Loss{LossKind::cross_entropy}(u, 1) == doctest::Approx(-std::log(0.2)));
    CHECK(Loss{LossKind::cross_entropy}(std::vector<double>{1.0, 0.0}, 1) == doctest::Approx(-std::log(1e-12)));
    CHECK(Loss{LossKind::l1}(u, 0) == doctest::Approx(0.6));
    CHECK(loss_satisfies_triangle(Loss{LossKind::zero_one}, 4));
    CHECK(loss_satisfies_triangle(Loss{LossKind::l1, 3.0}, 4));
}

namespace {

std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, int k) {
    std::uniform_int_distribution<int> lab(0, k - 1);
    std::vector<int> v(n);
    for (auto& x : v) x = lab(rng);
    return v;
}

FiniteHypothesis random_hypothesis(std::mt19937_64& rng, std::size_t nt, std::size_t ns, int k) {
    return {random_labels(rng, nt, k), random_labels(rng, ns, k)};
}

}  // namespace

TEST_CASE("source-guided uncertainty scan") {
    std::mt19937_64 rng(2);
    const int k = 3;
    const Loss zo{LossKind::zero_one};
    const auto ys = random_labels(rng, 7, k);

    const auto hg = random_hypothesis(rng, 6, 7, k);
    const auto single = source_guided_uncertainty(hard_scores(hg, k), {hg}, ys, k, zo, zo);
    CHECK(single.value == doctest::Approx(source_risk(hg, ys, zo, k)));

    for (int trial = 0; trial < 50; ++trial) {
        std::vector<FiniteHypothesis> hs;
        for (int i = 0; i < 5; ++i) hs.push_back(random_hypothesis(rng, 6, 7, k));
        std::vector<std::vector<double>> g;
        for (int i = 0; i < 6; ++i) g.push_back(oracle::random_simplex(rng, k));
        const Loss ce{LossKind::cross_entropy};
        const auto r = source_guided_uncertainty(g, hs, ys, k, ce, zo);
        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t h = 0; h < hs.size(); ++h) {
            double t = 0.0;
            for (std::size_t i = 0; i < 6; ++i) t += -std::log(std::max(g[i][static_cast<std::size_t>(hs[h].target[i])], 1e-12));
            double s = 0.0;
            for (std::size_t j = 0; j < 7; ++j) s += hs[h].source[j] != ys[j] ? 1.0 : 0.0;
            const double v = t / 6.0 + s / 7.0;
            if (v < best) {
                best = v;
                arg = h;
            }
        }
        CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
        CHECK(r.argmin == arg);

        // a larger list can only lower the value
        auto more = hs;
        more.push_back(random_hypothesis(rng, 6, 7, k));
        CHECK(source_guided_uncertainty(g, more, ys, k, ce, zo).value <= r.value);
    }
    CHECK_THROWS_AS(source_guided_uncertainty({}, {}, ys, k, zo, zo), Error);
}

TEST_CASE("source-guided uncertainty properties on random finite classes") {
    std::mt19937_64 rng(3);
    const int k = 3;
    for (int trial = 0; trial < 60; ++trial) {
        const auto yt = random_labels(rng, 6, k);
        const auto ys = random_labels(rng, 6, k);
        std::vector<FiniteHypothesis> h;
        for (int i = 0; i < 4; ++i) h.push_back(random_hypothesis(rng, 6, 6, k));
        auto h_tilde = h;
        for (int i = 0; i < 3; ++i) h_tilde.push_back(random_hypothesis(rng, 6, 6, k));
        const auto rep = verify_sgu_properties(h, h_tilde, yt, ys, k, Loss{LossKind::zero_one});
        CHECK(rep.holds());
        const auto same = verify_sgu_properties(h, h, yt, ys, k, Loss{LossKind::zero_one});
        CHECK(same.holds());
    }
    std::vector<FiniteHypothesis> h{{{0}, {0}}};
    std::vector<FiniteHypothesis> other{{{1}, {1}}};
    CHECK_THROWS_AS(verify_sgu_properties(h, other, std::vector<int>{0}, std::vector<int>{0}, 2,
                                          Loss{LossKind::zero_one}),
                    Error);
}

TEST_CASE("cross-entropy and scaled L1 loss pair") {
    CHECK(cross_entropy_l1_scale(1.0, 3) == doctest::Approx(2.0 + std::log(3.0)));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> logits(4);
        for (auto& a : logits) a = u(rng);
        CHECK(cross_entropy_l1_condition(logits, 2.0));
    }
    CHECK_FALSE(cross_entropy_l1_condition(std::vector<double>{3.0, 0.0}, 2.0));
}
