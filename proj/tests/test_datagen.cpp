#include <doctest.h>

#include <cmath>
#include <numbers>

#include "imd/datagen.hpp"

using namespace imd;

TEST_CASE("class centers") {
    const auto one = class_centers(1);
    REQUIRE(one.size() == 1);
    CHECK(one[0][0] == 0.0);
    CHECK(one[0][1] == 1.0);

    const auto four = class_centers(4);
    const double want4[4][2] = {{0, 1}, {-1, 0}, {0, -1}, {1, 0}};
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(four[k][1] - want4[k][1]) < 1e-15);
        CHECK(std::abs(four[k][0] - want4[k][0]) < 1e-15);
    }
    const auto three = class_centers(3);
    const double h = std::sqrt(3.0) / 2.0;
    CHECK(std::abs(three[1][0] + h) < 1e-15);
    CHECK(std::abs(three[1][1] + 0.5) < 1e-15);
    CHECK(std::abs(three[2][0] - h) < 1e-15);
    CHECK(std::abs(three[2][1] + 0.5) < 1e-15);
    CHECK_THROWS_AS(class_centers(0), Error);
}

TEST_CASE("source and target proportions") {
    for (double v : source_proportions(5, 0.0)) CHECK(v == doctest::Approx(0.2).epsilon(1e-15));
    const auto two = source_proportions(2, std::log(2.0));
    CHECK(two[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(two[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    const double e = std::numbers::e;
    const double z = e + e * e + e * e * e;
    const auto p = source_proportions(3, 1.0);
    CHECK(p[0] == doctest::Approx(e / z).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(e * e / z).epsilon(1e-14));
    CHECK(p[2] == doctest::Approx(e * e * e / z).epsilon(1e-14));
    CHECK(p[0] == doctest::Approx(0.0900).epsilon(1e-3));
    CHECK(p[2] == doctest::Approx(0.6652).epsilon(1e-3));

    const auto q = target_proportions(3, 1.0);
    CHECK(q[0] == p[2]);
    CHECK(q[1] == p[1]);
    CHECK(q[2] == p[0]);

    const auto big = source_proportions(4, 800.0);
    CHECK(std::isfinite(big[0]));
    CHECK(big[3] == doctest::Approx(1.0));
    CHECK_THROWS_AS(source_proportions(3, -1.0), Error);
}

TEST_CASE("largest remainder rounding") {
    const std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK(largest_remainder_counts(10, thirds) == std::vector<std::size_t>{4, 3, 3});
    const std::vector<double> q{0.665, 0.245, 0.09};
    CHECK(largest_remainder_counts(300, q) == std::vector<std::size_t>{200, 73, 27});
    const auto qq = target_proportions(3, 1.0);
    const auto c = largest_remainder_counts(300, qq);
    std::size_t total = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        total += c[k];
        CHECK(std::abs(static_cast<double>(c[k]) - 300.0 * qq[k]) < 1.0);
    }
    CHECK(total == 300);
}

TEST_CASE("generate_pair sizes, determinism and counts") {
    ToyConfig cfg;
    cfg.seed = 11;
    const auto a = generate_pair(cfg);
    const auto b = generate_pair(cfg);
    CHECK(a.source.points() == b.source.points());
    CHECK(a.source.labels() == b.source.labels());
    CHECK(a.target.points() == b.target.points());
    CHECK(a.source.size() == 300);
    CHECK(a.target.size() == 300);
    CHECK(a.target.class_counts() == largest_remainder_counts(300, a.target_props));
    // class 1 receives the largest share
    const auto tc = a.target.class_counts();
    CHECK(tc[0] > tc[1]);
    CHECK(tc[1] > tc[2]);

    cfg.seed = 12;
    const auto c = generate_pair(cfg);
    CHECK(c.source.points() != a.source.points());

    ToyConfig bad;
    bad.num_classes = 1;
    CHECK_THROWS_AS(generate_pair(bad), Error);
    bad = {};
    bad.sigma = 0.0;
    CHECK_THROWS_AS(generate_pair(bad), Error);
    bad = {};
    bad.n_target = 2;
    CHECK_THROWS_AS(generate_pair(bad), Error);
}

TEST_CASE("balanced generation and class means") {
    ToyConfig cfg;
    cfg.num_classes = 2;
    cfg.eta = 0.0;
    cfg.n_source = cfg.n_target = 4000;
    cfg.theta_deg = 90.0;
    const auto pair = generate_pair(cfg);
    CHECK(pair.target.class_counts() == std::vector<std::size_t>{2000, 2000});
    const auto sp = pair.source.class_proportions();
    CHECK(std::abs(sp[0] - 0.5) < 0.05);

    // rotated target class means sit at R(theta) mu_k
    const auto centers = class_centers(2);
    for (int k = 0; k < 2; ++k) {
        const auto want = rotate(centers[static_cast<std::size_t>(k)], std::numbers::pi / 2);
        double mx = 0, my = 0;
        const auto idx = pair.target.class_indices(k);
        for (auto i : idx) {
            mx += pair.target.points()[i][0];
            my += pair.target.points()[i][1];
        }
        mx /= static_cast<double>(idx.size());
        my /= static_cast<double>(idx.size());
        CHECK(std::abs(mx - want[0]) < 0.05);
        CHECK(std::abs(my - want[1]) < 0.05);
    }
}

TEST_CASE("source proportions converge") {
    ToyConfig cfg;
    cfg.n_source = 3000;
    cfg.n_target = 3;
    int ok = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        cfg.seed = s;
        const auto pair = generate_pair(cfg);
        const auto ph = pair.source.class_proportions();
        double worst = 0.0;
        for (std::size_t k = 0; k < ph.size(); ++k) worst = std::max(worst, std::abs(ph[k] - pair.source_props[k]));
        ok += worst <= 0.05;
    }
    CHECK(ok >= 99);
}

TEST_CASE("rotation preserves distances") {
    ToyConfig cfg;
    cfg.n_source = 40;
    const auto pair = generate_pair(cfg);
    const auto& pts = pair.source.points();
    std::vector<Point> rot;
    for (const auto& p : pts) rot.push_back(rotate(p, 30.0 * std::numbers::pi / 180.0));
    const auto c0 = cost_matrix(pts, pts);
    const auto c1 = cost_matrix(rot, rot);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) CHECK(std::abs(c0(i, j) - c1(i, j)) <= 1e-9);
}

TEST_CASE("rng primitives") {
    Rng r(5);
    double mean = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        mean += z;
        sq += z * z;
    }
    mean /= n;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
    const std::vector<double> p{0.0, 1.0, 0.0};
    for (int i = 0; i < 100; ++i) CHECK(r.categorical(p) == 1);
    CHECK(substream_seed(1, 0) != substream_seed(1, 1));
    CHECK(substream_seed(1, 0) != substream_seed(2, 0));
}

TEST_CASE("shared-atom label-shift instances") {
    const std::vector<std::vector<Point>> atoms{{{0, 0}, {0, 1}}, {{5, 5}}};
    const std::vector<double> p{0.8, 0.2}, q{0.5, 0.5};
    const auto inst = shared_atom_label_shift(atoms, p, q);
    CHECK(inst.source.size() == 3);
    CHECK(inst.source.points() == inst.target.points());
    CHECK(inst.source.weights() == std::vector<double>{0.4, 0.4, 0.2});
    CHECK(inst.target.weights() == std::vector<double>{0.25, 0.25, 0.5});
    CHECK(inst.atom_labels == std::vector<int>{0, 0, 1});
    CHECK(inst.conditionals[0].weights() == std::vector<double>{0.5, 0.5});

    const std::vector<std::vector<Point>> overlap{{{0, 0}}, {{1, 1}, {0, 0}}};
    CHECK_THROWS_AS(shared_atom_label_shift(overlap, p, q), Error);
    CHECK_THROWS_AS(shared_atom_label_shift(atoms, std::vector<double>{0.5, 0.4}, q), Error);
    CHECK_THROWS_AS(shared_atom_label_shift(atoms, std::vector<double>{1.0}, q), Error);
}
