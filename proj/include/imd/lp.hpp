#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "imd/error.hpp"

namespace imd::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { less_equal, equal, greater_equal };
enum class Sense { minimize, maximize };
enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_error };

const char* to_string(Status status);

struct Term {
    std::size_t var;
    double coef;
};

struct Constraint {
    std::vector<Term> terms;
    Relation relation;
    double rhs;
};

/// c.x subject to rows of (terms, relation, rhs) and per-variable bounds.
/// Stored column-agnostic: each row keeps its own sparse term list.
class LinearProgram {
  public:
    explicit LinearProgram(Sense sense = Sense::minimize) : sense_(sense) {}

    std::size_t add_variable(double cost, double lower = 0.0, double upper = kInfinity);
    std::size_t add_constraint(std::vector<Term> terms, Relation relation, double rhs);

    void set_cost(std::size_t var, double cost);
    void set_bounds(std::size_t var, double lower, double upper);

    Sense sense() const { return sense_; }
    std::size_t num_variables() const { return cost_.size(); }
    std::size_t num_constraints() const { return rows_.size(); }
    const std::vector<double>& cost() const { return cost_; }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    const std::vector<Constraint>& constraints() const { return rows_; }

    double objective(const std::vector<double>& x) const;
    /// Largest violation of any row or bound by x.
    double primal_residual(const std::vector<double>& x) const;

  private:
    Sense sense_;
    std::vector<double> cost_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<Constraint> rows_;
};

struct LpSolution {
    Status status = Status::numerical_error;
    double value = 0.0;
    std::vector<double> x;
    /// Shadow prices: derivative of the optimal value w.r.t. each rhs.
    std::vector<double> duals;
    std::size_t iterations = 0;
    double primal_residual = 0.0;
    /// Worst reduced-cost sign violation at the returned basis.
    double dual_residual = 0.0;
    std::string diagnostics;

    bool optimal() const { return status == Status::optimal; }
};

struct SolverOptions {
    double feasibility_tol = 1e-8;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-10;
    /// 0 means 50 * (rows + columns).
    std::size_t max_iterations = 0;
    std::size_t refactor_interval = 1000;
    std::size_t bland_after_degenerate = 80;
};

/// Dense revised simplex (two phases, explicit basis inverse, Harris ratio
/// test, Devex pricing over rotating column subsets, Bland's rule while
/// stalling). One solve at a time per instance.
class SimplexSolver {
  public:
    explicit SimplexSolver(SolverOptions options = {}) : options_(options) {}
    LpSolution solve(const LinearProgram& program);

  private:
    SolverOptions options_;
};

LpSolution solve(const LinearProgram& program, const SolverOptions& options = {});

/// Plain-text dump used to reproduce solver issues.
void write_text(std::ostream& out, const LinearProgram& program);

}  // namespace imd::lp
