#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "imd/measures.hpp"

namespace imd {

/// mt19937_64 seeded through splitmix64, with its own uniform and normal
/// transforms so draws do not depend on the standard library's
/// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal (Box-Muller, second value cached).
    double normal();
    /// Index drawn from a probability vector.
    std::size_t categorical(std::span<const double> probs);

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of substream `index` of `seed`; draw d of a sweep uses substream d.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

struct ToyConfig {
    int num_classes = 3;
    std::size_t n_source = 300;
    std::size_t n_target = 300;
    double sigma = 0.35;
    double eta = 1.0;
    /// Target rotation in degrees.
    double theta_deg = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Class k (0-based) sits at R(2 pi k / K) (0, 1).
std::vector<Point> class_centers(int num_classes);

/// p_k proportional to exp(eta * k) for k = 1..K.
std::vector<double> source_proportions(int num_classes, double eta);

/// Source proportions sorted in decreasing order: class 1 gets the largest.
std::vector<double> target_proportions(int num_classes, double eta);

/// Largest-remainder rounding of n * props; ties go to the smaller index.
std::vector<std::size_t> largest_remainder_counts(std::size_t n, std::span<const double> props);

Point rotate(const Point& p, double theta_rad);

struct ToyPair {
    LabeledDataset source;
    LabeledDataset target;
    std::vector<double> source_props;
    std::vector<double> target_props;
};

/// Source labels are drawn from p, then features from N(mu_k, sigma^2 I).
/// Target classes come in index order with fixed counts, features from
/// N(R(theta) mu_k, sigma^2 I). Substream 0 feeds the source, 1 the target.
ToyPair generate_pair(const ToyConfig& config);

struct SharedAtomInstance {
    std::vector<DiscreteMeasure> conditionals;
    std::vector<double> p;
    std::vector<double> q;
    /// sum_k p_k S|k and sum_k q_k S|k on the concatenated class atoms.
    DiscreteMeasure source;
    DiscreteMeasure target;
    /// Class of each concatenated atom (0-based).
    std::vector<int> atom_labels;
};

/// Uniform conditionals on disjoint per-class atom sets, reweighted by p
/// (source) and q (target). Overlapping atoms across classes throw.
SharedAtomInstance shared_atom_label_shift(const std::vector<std::vector<Point>>& atoms, std::span<const double> p,
                                           std::span<const double> q);

}  // namespace imd
