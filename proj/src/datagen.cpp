#include "imd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace imd {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x5851f42d4c957f2dULL));
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

std::size_t Rng::categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) return k;
    }
    // rounding left u above the final partial sum
    for (std::size_t k = probs.size(); k-- > 0;)
        if (probs[k] > 0.0) return k;
    throw Error("categorical: all probabilities are zero");
}

void ToyConfig::validate() const {
    if (num_classes < 2) throw Error("config: K must be >= 2");
    if (n_source < static_cast<std::size_t>(num_classes) || n_target < static_cast<std::size_t>(num_classes))
        throw Error("config: sample sizes must be >= K");
    if (!(sigma > 0.0)) throw Error("config: sigma must be > 0");
    if (!(eta >= 0.0)) throw Error("config: eta must be >= 0");
    if (!std::isfinite(theta_deg)) throw Error("config: theta must be finite");
}

Point rotate(const Point& p, double theta_rad) {
    if (p.size() != 2) throw Error("rotate: points must be 2-dimensional");
    const double c = std::cos(theta_rad), s = std::sin(theta_rad);
    return {c * p[0] - s * p[1], s * p[0] + c * p[1]};
}

std::vector<Point> class_centers(int num_classes) {
    if (num_classes < 1) throw Error("class_centers: K must be >= 1");
    std::vector<Point> out;
    for (int k = 0; k < num_classes; ++k)
        out.push_back(rotate({0.0, 1.0}, 2.0 * std::numbers::pi * k / num_classes));
    return out;
}

std::vector<double> source_proportions(int num_classes, double eta) {
    if (num_classes < 1) throw Error("source_proportions: K must be >= 1");
    if (!(eta >= 0.0)) throw Error("source_proportions: eta must be >= 0");
    // shift the exponent by the largest term to stay finite for large eta
    std::vector<double> p(static_cast<std::size_t>(num_classes));
    for (int k = 1; k <= num_classes; ++k) p[static_cast<std::size_t>(k - 1)] = std::exp(eta * (k - num_classes));
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= s;
    return p;
}

std::vector<double> target_proportions(int num_classes, double eta) {
    auto q = source_proportions(num_classes, eta);
    std::sort(q.begin(), q.end(), std::greater<>());
    return q;
}

std::vector<std::size_t> largest_remainder_counts(std::size_t n, std::span<const double> props) {
    std::vector<std::size_t> counts(props.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t used = 0;
    for (std::size_t k = 0; k < props.size(); ++k) {
        const double exact = static_cast<double>(n) * props[k];
        counts[k] = static_cast<std::size_t>(std::floor(exact));
        used += counts[k];
        rem.emplace_back(exact - std::floor(exact), k);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; used < n && i < rem.size(); ++i, ++used) ++counts[rem[i].second];
    return counts;
}

ToyPair generate_pair(const ToyConfig& config) {
    config.validate();
    const int k = config.num_classes;
    const auto centers = class_centers(k);
    ToyPair out;
    out.source_props = source_proportions(k, config.eta);
    out.target_props = target_proportions(k, config.eta);

    Rng src(substream_seed(config.seed, 0));
    std::vector<Point> sp;
    std::vector<int> sl;
    for (std::size_t i = 0; i < config.n_source; ++i) {
        const auto c = static_cast<int>(src.categorical(out.source_props));
        const auto& mu = centers[static_cast<std::size_t>(c)];
        const double x = mu[0] + config.sigma * src.normal();
        const double y = mu[1] + config.sigma * src.normal();
        sp.push_back({x, y});
        sl.push_back(c);
    }
    out.source = LabeledDataset(std::move(sp), std::move(sl), k);

    Rng tgt(substream_seed(config.seed, 1));
    const double theta = config.theta_deg * std::numbers::pi / 180.0;
    const auto counts = largest_remainder_counts(config.n_target, out.target_props);
    std::vector<Point> tp;
    std::vector<int> tl;
    for (int c = 0; c < k; ++c) {
        const auto mu = rotate(centers[static_cast<std::size_t>(c)], theta);
        for (std::size_t i = 0; i < counts[static_cast<std::size_t>(c)]; ++i) {
            const double x = mu[0] + config.sigma * tgt.normal();
            const double y = mu[1] + config.sigma * tgt.normal();
            tp.push_back({x, y});
            tl.push_back(c);
        }
    }
    out.target = LabeledDataset(std::move(tp), std::move(tl), k);
    return out;
}

SharedAtomInstance shared_atom_label_shift(const std::vector<std::vector<Point>>& atoms, std::span<const double> p,
                                           std::span<const double> q) {
    const std::size_t k = atoms.size();
    if (p.size() != k || q.size() != k) throw Error("shared_atom_label_shift: p and q need one entry per class");
    for (std::size_t a = 0; a < k; ++a) {
        if (atoms[a].empty()) throw Error("shared_atom_label_shift: every class needs at least one atom");
        for (std::size_t b = a + 1; b < k; ++b)
            for (const auto& x : atoms[a])
                for (const auto& y : atoms[b])
                    if (x == y)
                        throw Error("shared_atom_label_shift: classes " + std::to_string(a + 1) + " and " +
                                    std::to_string(b + 1) + " share an atom");
    }
    auto check_simplex = [](std::span<const double> v, const char* name) {
        double s = 0.0;
        for (double x : v) {
            if (!(x >= 0.0)) throw Error(std::string("shared_atom_label_shift: negative entry in ") + name);
            s += x;
        }
        if (std::abs(s - 1.0) > 1e-12) throw Error(std::string("shared_atom_label_shift: ") + name + " must sum to 1");
    };
    check_simplex(p, "p");
    check_simplex(q, "q");

    SharedAtomInstance out;
    out.p.assign(p.begin(), p.end());
    out.q.assign(q.begin(), q.end());
    for (std::size_t c = 0; c < k; ++c) {
        const double w = 1.0 / static_cast<double>(atoms[c].size());
        out.conditionals.emplace_back(atoms[c], std::vector<double>(atoms[c].size(), w));
        out.atom_labels.insert(out.atom_labels.end(), atoms[c].size(), static_cast<int>(c));
    }
    // every atom kept even at zero weight so source and target share the atom list
    std::vector<Point> pts;
    std::vector<double> ws, wt;
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < atoms[c].size(); ++j) {
            pts.push_back(atoms[c][j]);
            ws.push_back(p[c] * out.conditionals[c].weight(j));
            wt.push_back(q[c] * out.conditionals[c].weight(j));
        }
    out.source = DiscreteMeasure(pts, std::move(ws));
    out.target = DiscreteMeasure(std::move(pts), std::move(wt));
    return out;
}

}  // namespace imd
