#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "imd/lp.hpp"
#include "imd/measures.hpp"

namespace imd::ot {

/// A transport LP did not reach a certified optimum.
class SolveError : public Error {
  public:
    SolveError(lp::Status status, const std::string& what) : Error(what), status_(status) {}
    lp::Status status() const { return status_; }

  private:
    lp::Status status_;
};

struct TransportResult {
    double value = 0.0;
    /// n_target x n_source coupling.
    Matrix plan;
    std::size_t iterations = 0;
};

/// Primal solution of the per-class relaxed problem: one block per class.
struct TransportPlanSet {
    /// plans[k] is n_target x (atoms of conditional k).
    std::vector<Matrix> plans;
    std::vector<double> beta;
    double objective = 0.0;
    std::size_t iterations = 0;

    /// Blocks side by side in class order.
    Matrix concatenated() const;
    /// Scatters the blocks back to dataset column order; members[k][j] is the
    /// dataset index of column j of block k.
    Matrix to_dataset_order(const std::vector<std::vector<std::size_t>>& members, std::size_t n_source) const;
};

struct LipschitzPotential {
    std::vector<double> values;
    /// Atoms where the potential is constrained to be nonnegative.
    std::vector<std::size_t> nonneg_on;
};

struct DualResult {
    double value = 0.0;
    LipschitzPotential potential;
};

/// Classic Kantorovich problem; both marginals enforced with equality.
TransportResult wasserstein1(const DiscreteMeasure& target, const DiscreteMeasure& source, const CostMatrix& cost);

/// min <C,P> s.t. rows(P) = t, cols(P) <= (1+beta) s.
TransportResult partial_ot_global(const DiscreteMeasure& target, const DiscreteMeasure& source, const CostMatrix& cost,
                                  double beta);

/// Per-class relaxed transport for a fixed relaxation vector: block k has
/// column capacities (p_k + beta_k) times the weights of conditional k.
/// costs[k] is n_target x (atoms of conditional k).
TransportPlanSet partial_ot_per_class(const DiscreteMeasure& target, const std::vector<DiscreteMeasure>& conditionals,
                                      std::span<const double> proportions, std::span<const double> beta,
                                      const std::vector<CostMatrix>& costs);

/// Same problem with beta optimized jointly under beta >= 0, sum(beta) = beta_total.
TransportPlanSet partial_ot_beta_split(const DiscreteMeasure& target, const std::vector<DiscreteMeasure>& conditionals,
                                       std::span<const double> proportions, double beta_total,
                                       const std::vector<CostMatrix>& costs);

/// sup sum_a (t_a - w_a) f_a over f with f_a - f_b <= d_ab on all pairs and
/// f >= 0 where w > 0. With zero_on_source the potential is pinned to 0 on
/// the source support instead.
DualResult lipschitz_imd_dual(std::span<const double> target_mass, std::span<const double> source_mass,
                              const CostMatrix& ground, bool zero_on_source = false);

/// Ground set = target atoms followed by source atoms, Euclidean distances.
DualResult lipschitz_imd_dual(const DiscreteMeasure& target, const DiscreteMeasure& relaxed_source,
                              bool zero_on_source = false);

/// E_T[ d(x, supp S) ].
double support_distance_imd(const DiscreteMeasure& target, const DiscreteMeasure& source);

/// Conditionals, proportions and per-class cost blocks of a labeled source.
struct PerClassProblem {
    std::vector<DiscreteMeasure> conditionals;
    std::vector<double> proportions;
    std::vector<CostMatrix> costs;
    std::vector<std::vector<std::size_t>> members;
};

PerClassProblem per_class_problem(const DiscreteMeasure& target, const LabeledDataset& source);

/// Relaxed source S + sum_k beta_k S|k written as one measure over the
/// concatenated conditional atoms: weight (p_k + beta_k) w_kj.
DiscreteMeasure relaxed_source(const std::vector<DiscreteMeasure>& conditionals, std::span<const double> proportions,
                               std::span<const double> beta);

}  // namespace imd::ot
