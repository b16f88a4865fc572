#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imd/families.hpp"
#include "imd/measures.hpp"

namespace imd {

struct ImdResult {
    double value = 0.0;
    /// Maximizing function over the family's ground points; ties go to the
    /// lexicographically smallest vector.
    std::vector<double> argmax;
    std::uint64_t family_size_scanned = 0;
};

/// max over admitted f of E_Q1[f] - E_Q2[f].
ImdResult imd_bruteforce(const DiscreteMeasure& q1, const DiscreteMeasure& q2, const FunctionFamily& family,
                         const Localization& loc = Localization::none());

/// Same scan on weight vectors already aligned with the ground set.
ImdResult imd_bruteforce(std::span<const double> q1, std::span<const double> q2, const FunctionFamily& family,
                         const Localization& loc = Localization::none());

/// sum_i (q1_i - q2_i)_+ over the union of both supports.
double imd_tv_closed_form(const DiscreteMeasure& q1, const DiscreteMeasure& q2);

/// T-mass on atoms that are not atoms of positive S-weight.
double imd_f0_support_mass(const DiscreteMeasure& target, const DiscreteMeasure& source, double tol = 1e-12);

struct DualityReport {
    /// IMD over the globally localized family.
    double localized_value = 0.0;
    /// Same constraint over the convex hull [0,1]^n of the indicator and
    /// grid families (fractional knapsack); NaN for hdh.
    double hull_localized_value = 0.0;
    std::vector<double> alpha_grid;
    /// IMD_F(T, (1+a) S) + eps a for each grid point.
    std::vector<double> dual_values;
    bool inequality_holds = true;
    double worst_violation = 0.0;
    double grid_min = 0.0;
    double grid_alpha = 0.0;
    /// Golden-section refinement around the best grid point.
    double refined_min = 0.0;
    double refined_alpha = 0.0;
    /// refined_min minus the hull value (or the localized value for hdh).
    double gap = 0.0;
};

DualityReport duality_check(const DiscreteMeasure& target, const DiscreteMeasure& source, const FunctionFamily& family,
                            double eps, std::span<const double> alpha_grid);

/// Uniform grid {0, step, ..., max}.
std::vector<double> alpha_grid(double max, double step);

struct HdhResult {
    ImdResult imd;
    /// inf over disagreement sets f of P_T[f=0] + W[f=1], W the relaxed source.
    double risk_form = 0.0;
    /// |1 - IMD - risk_form| <= 1e-12 (requires a probability target).
    bool identity_holds = true;
};

/// Hypotheses are label vectors over ground. W = (1 + beta) S.
HdhResult hdh_imd(const DiscreteMeasure& target, const DiscreteMeasure& source, const std::vector<Point>& ground,
                  const std::vector<Hypothesis>& hypotheses, double beta);

/// W = sum_k (p_k + beta_k) S|k.
HdhResult hdh_imd(const DiscreteMeasure& target, const std::vector<DiscreteMeasure>& conditionals,
                  std::span<const double> proportions, std::span<const double> beta, const std::vector<Point>& ground,
                  const std::vector<Hypothesis>& hypotheses);

struct SupportBoundReport {
    /// IMD over the disagreement sets with zero S-mass.
    double lhs = 0.0;
    /// 1 - T(supp_HH S).
    double rhs = 0.0;
    /// Membership of each ground point in supp_HH S.
    std::vector<bool> support;
    bool holds = true;
};

SupportBoundReport hdh_support_bound_check(const DiscreteMeasure& target, const DiscreteMeasure& source,
                                           const std::vector<Point>& ground,
                                           const std::vector<Hypothesis>& hypotheses);

}  // namespace imd
