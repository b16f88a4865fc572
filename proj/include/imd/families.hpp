#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imd/measures.hpp"

namespace imd {

/// Labels of one hypothesis at each ground point.
using Hypothesis = std::vector<int>;

enum class FamilyKind { indicators, grid, hdh, lipschitz_lp };

const char* to_string(FamilyKind kind);

inline constexpr std::size_t kMaxIndicatorAtoms = 22;
inline constexpr std::size_t kMaxGridFunctions = std::size_t{1} << 22;
inline constexpr std::size_t kMaxHypotheses = 60;

/// Functions are value vectors over ground_points. Measures evaluated
/// against a family must be supported on the ground points.
struct FunctionFamily {
    FamilyKind kind = FamilyKind::indicators;
    std::vector<Point> ground_points;
    std::vector<Hypothesis> hypotheses;
    double grid_step = 0.25;

    static FunctionFamily indicators(std::vector<Point> ground);
    static FunctionFamily grid(std::vector<Point> ground, double step = 0.25);
    static FunctionFamily hdh(std::vector<Point> ground, std::vector<Hypothesis> hypotheses);
    static FunctionFamily lipschitz(std::vector<Point> ground);

    std::size_t size() const { return ground_points.size(); }
    bool enumerable() const { return kind != FamilyKind::lipschitz_lp; }
};

/// Weight vector of a measure over the ground points, matching coordinates
/// within tol. Throws if an atom of positive weight has no ground point.
std::vector<double> project_onto(const DiscreteMeasure& measure, const std::vector<Point>& ground, double tol = 1e-12);

/// Distinct atom coordinates of the measures, in first-seen order.
std::vector<Point> union_support(const std::vector<const DiscreteMeasure*>& measures, double tol = 1e-12);

struct Localization {
    enum class Mode { none, global, per_class };

    Mode mode = Mode::none;
    /// One bound for global, one per class otherwise. Infinite bounds allowed.
    std::vector<double> eps;
    /// Reference measures: S for global, the conditionals S|k for per_class.
    std::vector<DiscreteMeasure> reference;

    static Localization none();
    static Localization global(double eps, DiscreteMeasure source);
    static Localization per_class(std::vector<double> eps, std::vector<DiscreteMeasure> conditionals);
};

/// A localization resolved against a ground set: membership tests on
/// function vectors.
class LocalizationFilter {
  public:
    LocalizationFilter(const Localization& loc, const std::vector<Point>& ground, double tol = 1e-12);

    bool admits(std::span<const double> f) const;
    /// E_ref[f] for each constraint row.
    std::vector<double> expectations(std::span<const double> f) const;

  private:
    std::vector<std::vector<double>> weights_;
    std::vector<double> eps_;
    double tol_;
};

/// Iterates the members of an enumerable family that pass a localization.
/// The null function comes first.
class FunctionEnumerator {
  public:
    FunctionEnumerator(const FunctionFamily& family, const Localization& loc = Localization::none());

    /// Writes the next admitted function into f; false when exhausted.
    bool next(std::vector<double>& f);
    /// Members generated so far, admitted or not.
    std::uint64_t generated() const { return generated_; }

  private:
    bool advance(std::vector<double>& f);

    const FunctionFamily& family_;
    LocalizationFilter filter_;
    std::size_t n_;
    std::uint64_t generated_ = 0;
    bool started_ = false;
    // indicators / grid: counter digits; hdh: distinct disagreement sets
    std::vector<int> digits_;
    int levels_ = 2;
    std::vector<std::vector<double>> hdh_members_;
    std::size_t hdh_pos_ = 0;
};

/// Every admitted member of the family, in enumeration order.
std::vector<std::vector<double>> enumerate(const FunctionFamily& family, const Localization& loc = Localization::none());

struct InclusionReport {
    /// per_class(eps_vec) subset of global(p . eps_vec)
    bool per_class_in_global = true;
    /// global(eps) subset of per_class(eps / p_k)
    bool global_in_per_class = true;
    std::size_t members_checked = 0;
    std::optional<std::vector<double>> counterexample;
    std::string detail;

    bool holds() const { return per_class_in_global && global_in_per_class; }
};

/// Compares both localizations member by member. The source is
/// S = sum_k p_k S|k; classes with p_k = 0 get an infinite bound.
InclusionReport localization_inclusion_check(const FunctionFamily& family, std::span<const double> eps_vec, double eps,
                                             std::span<const double> proportions,
                                             const std::vector<DiscreteMeasure>& conditionals);

/// Hypothesis list from a JSON array of label vectors.
std::vector<Hypothesis> hypotheses_from_json(const std::string& text);

}  // namespace imd
