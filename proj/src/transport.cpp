#include "imd/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imd::ot {

Matrix TransportPlanSet::concatenated() const {
    if (plans.empty()) return {};
    std::size_t cols = 0;
    for (const auto& p : plans) cols += p.cols();
    Matrix out(plans.front().rows(), cols);
    std::size_t offset = 0;
    for (const auto& p : plans) {
        for (std::size_t i = 0; i < p.rows(); ++i)
            for (std::size_t j = 0; j < p.cols(); ++j) out(i, offset + j) = p(i, j);
        offset += p.cols();
    }
    return out;
}

Matrix TransportPlanSet::to_dataset_order(const std::vector<std::vector<std::size_t>>& members,
                                          std::size_t n_source) const {
    if (members.size() != plans.size()) throw Error("to_dataset_order: one member list per block required");
    const std::size_t rows = plans.empty() ? 0 : plans.front().rows();
    Matrix out(rows, n_source);
    for (std::size_t k = 0; k < plans.size(); ++k) {
        if (members[k].size() != plans[k].cols()) throw Error("to_dataset_order: block width mismatch");
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < plans[k].cols(); ++j) {
                const std::size_t col = members[k][j];
                if (col >= n_source) throw Error("to_dataset_order: member index out of range");
                out(i, col) += plans[k](i, j);
            }
    }
    return out;
}

namespace {

enum class ColumnMode { equality, capacity, split };

struct Block {
    const CostMatrix* cost;
    std::vector<double> base;   // capacity (or exact marginal) per column
    std::vector<double> slope;  // multiplier of beta_k in split mode
};

struct BlockSolution {
    std::vector<Matrix> plans;
    std::vector<double> beta;
    double objective = 0.0;
    std::size_t iterations = 0;
};

BlockSolution solve_blocks(std::span<const double> target, const std::vector<Block>& blocks, ColumnMode mode,
                           double beta_total) {
    lp::LinearProgram program;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < target.size(); ++i)
        if (target[i] > 0.0) rows.push_back(i);

    struct Col {
        std::size_t block, local;
    };
    std::vector<Col> cols;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        for (std::size_t j = 0; j < blocks[k].base.size(); ++j) {
            const bool keep = mode == ColumnMode::split ? (blocks[k].base[j] > 0.0 || blocks[k].slope[j] > 0.0)
                                                        : blocks[k].base[j] > 0.0;
            if (keep) cols.push_back({k, j});
        }
    }

    // variable (r, c) has index r * cols.size() + c
    for (std::size_t r : rows)
        for (const auto& c : cols) program.add_variable((*blocks[c.block].cost)(r, c.local));
    std::vector<std::size_t> beta_var;
    if (mode == ColumnMode::split) {
        for (std::size_t k = 0; k < blocks.size(); ++k) beta_var.push_back(program.add_variable(0.0));
    }

    const std::size_t nc = cols.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<lp::Term> terms;
        terms.reserve(nc);
        for (std::size_t c = 0; c < nc; ++c) terms.push_back({r * nc + c, 1.0});
        program.add_constraint(std::move(terms), lp::Relation::equal, target[rows[r]]);
    }
    for (std::size_t c = 0; c < nc; ++c) {
        std::vector<lp::Term> terms;
        terms.reserve(rows.size() + 1);
        for (std::size_t r = 0; r < rows.size(); ++r) terms.push_back({r * nc + c, 1.0});
        const auto& blk = blocks[cols[c].block];
        if (mode == ColumnMode::split && blk.slope[cols[c].local] != 0.0)
            terms.push_back({beta_var[cols[c].block], -blk.slope[cols[c].local]});
        program.add_constraint(std::move(terms),
                               mode == ColumnMode::equality ? lp::Relation::equal : lp::Relation::less_equal,
                               blk.base[cols[c].local]);
    }
    if (mode == ColumnMode::split) {
        std::vector<lp::Term> terms;
        for (auto v : beta_var) terms.push_back({v, 1.0});
        program.add_constraint(std::move(terms), lp::Relation::equal, beta_total);
    }

    const auto sol = lp::solve(program);
    if (!sol.optimal()) {
        throw SolveError(sol.status, std::string("transport LP ") + lp::to_string(sol.status) +
                                         (sol.diagnostics.empty() ? "" : ": " + sol.diagnostics));
    }

    BlockSolution out;
    out.iterations = sol.iterations;
    for (const auto& blk : blocks) out.plans.emplace_back(target.size(), blk.base.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < nc; ++c) {
            const double v = std::max(0.0, sol.x[r * nc + c]);
            out.plans[cols[c].block](rows[r], cols[c].local) = v;
            out.objective += v * (*blocks[cols[c].block].cost)(rows[r], cols[c].local);
        }
    }
    for (auto v : beta_var) out.beta.push_back(std::max(0.0, sol.x[v]));
    return out;
}

void check_target(const DiscreteMeasure& target, const CostMatrix& cost, std::size_t n_source) {
    if (cost.rows() != target.size() || cost.cols() != n_source)
        throw Error("cost matrix shape " + std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()) +
                    " does not match measures " + std::to_string(target.size()) + "x" + std::to_string(n_source));
}

void check_per_class(const DiscreteMeasure& target, const std::vector<DiscreteMeasure>& conditionals,
                     std::span<const double> proportions, const std::vector<CostMatrix>& costs) {
    const std::size_t k = conditionals.size();
    if (proportions.size() != k || costs.size() != k)
        throw Error("per-class transport: conditionals, proportions and costs must have one entry per class");
    for (std::size_t c = 0; c < k; ++c) {
        if (proportions[c] < 0.0) throw Error("per-class transport: negative class proportion");
        check_target(target, costs[c], conditionals[c].size());
    }
}

}  // namespace

TransportResult wasserstein1(const DiscreteMeasure& target, const DiscreteMeasure& source, const CostMatrix& cost) {
    check_target(target, cost, source.size());
    const double mt = target.mass(), ms = source.mass();
    if (std::abs(mt - ms) > 1e-10)
        throw Error("wasserstein1: masses differ (" + std::to_string(mt) + " vs " + std::to_string(ms) + ")");
    std::vector<Block> blocks{{&cost, source.weights(), {}}};
    auto sol = solve_blocks(target.weights(), blocks, ColumnMode::equality, 0.0);
    return {sol.objective, std::move(sol.plans.front()), sol.iterations};
}

TransportResult partial_ot_global(const DiscreteMeasure& target, const DiscreteMeasure& source, const CostMatrix& cost,
                                  double beta) {
    if (!(beta >= 0.0)) throw Error("partial_ot_global: beta must be >= 0");
    check_target(target, cost, source.size());
    std::vector<double> cap(source.weights());
    for (double& c : cap) c *= 1.0 + beta;
    std::vector<Block> blocks{{&cost, std::move(cap), {}}};
    auto sol = solve_blocks(target.weights(), blocks, ColumnMode::capacity, 0.0);
    return {sol.objective, std::move(sol.plans.front()), sol.iterations};
}

TransportPlanSet partial_ot_per_class(const DiscreteMeasure& target, const std::vector<DiscreteMeasure>& conditionals,
                                      std::span<const double> proportions, std::span<const double> beta,
                                      const std::vector<CostMatrix>& costs) {
    check_per_class(target, conditionals, proportions, costs);
    if (beta.size() != conditionals.size()) throw Error("partial_ot_per_class: one beta per class required");
    std::vector<Block> blocks;
    for (std::size_t k = 0; k < conditionals.size(); ++k) {
        if (!(beta[k] >= 0.0)) throw Error("partial_ot_per_class: beta must be >= 0");
        std::vector<double> cap(conditionals[k].weights());
        for (double& c : cap) c *= proportions[k] + beta[k];
        blocks.push_back({&costs[k], std::move(cap), {}});
    }
    auto sol = solve_blocks(target.weights(), blocks, ColumnMode::capacity, 0.0);
    TransportPlanSet out;
    out.plans = std::move(sol.plans);
    out.beta.assign(beta.begin(), beta.end());
    out.objective = sol.objective;
    out.iterations = sol.iterations;
    return out;
}

TransportPlanSet partial_ot_beta_split(const DiscreteMeasure& target, const std::vector<DiscreteMeasure>& conditionals,
                                       std::span<const double> proportions, double beta_total,
                                       const std::vector<CostMatrix>& costs) {
    check_per_class(target, conditionals, proportions, costs);
    if (!(beta_total >= 0.0)) throw Error("partial_ot_beta_split: beta must be >= 0");
    std::vector<Block> blocks;
    for (std::size_t k = 0; k < conditionals.size(); ++k) {
        std::vector<double> base(conditionals[k].weights());
        for (double& c : base) c *= proportions[k];
        blocks.push_back({&costs[k], std::move(base), conditionals[k].weights()});
    }
    auto sol = solve_blocks(target.weights(), blocks, ColumnMode::split, beta_total);
    TransportPlanSet out;
    out.plans = std::move(sol.plans);
    out.beta = std::move(sol.beta);
    out.objective = sol.objective;
    out.iterations = sol.iterations;
    return out;
}

DualResult lipschitz_imd_dual(std::span<const double> target_mass, std::span<const double> source_mass,
                              const CostMatrix& ground, bool zero_on_source) {
    const std::size_t n = target_mass.size();
    if (source_mass.size() != n || ground.rows() != n || ground.cols() != n)
        throw Error("lipschitz_imd_dual: masses and ground costs must share the atom list");
    lp::LinearProgram program(lp::Sense::maximize);
    LipschitzPotential pot;
    for (std::size_t a = 0; a < n; ++a) {
        const bool on_source = source_mass[a] > 0.0;
        double lower = -lp::kInfinity, upper = lp::kInfinity;
        if (on_source) {
            lower = 0.0;
            if (zero_on_source) upper = 0.0;
            pot.nonneg_on.push_back(a);
        }
        program.add_variable(target_mass[a] - source_mass[a], lower, upper);
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) program.add_constraint({{a, 1.0}, {b, -1.0}}, lp::Relation::less_equal, ground(a, b));
    const auto sol = lp::solve(program);
    if (!sol.optimal()) {
        throw SolveError(sol.status, std::string("Lipschitz dual LP ") + lp::to_string(sol.status) +
                                         (sol.diagnostics.empty() ? "" : ": " + sol.diagnostics));
    }
    pot.values = sol.x;
    return {sol.value, std::move(pot)};
}

DualResult lipschitz_imd_dual(const DiscreteMeasure& target, const DiscreteMeasure& relaxed_source,
                              bool zero_on_source) {
    std::vector<Point> ground = target.points();
    ground.insert(ground.end(), relaxed_source.points().begin(), relaxed_source.points().end());
    std::vector<double> t(ground.size(), 0.0), w(ground.size(), 0.0);
    for (std::size_t i = 0; i < target.size(); ++i) t[i] = target.weight(i);
    for (std::size_t j = 0; j < relaxed_source.size(); ++j) w[target.size() + j] = relaxed_source.weight(j);
    return lipschitz_imd_dual(t, w, cost_matrix(ground, ground), zero_on_source);
}

double support_distance_imd(const DiscreteMeasure& target, const DiscreteMeasure& source) {
    std::vector<const Point*> support;
    for (std::size_t j = 0; j < source.size(); ++j)
        if (source.weight(j) > 0.0) support.push_back(&source.point(j));
    if (support.empty()) throw Error("support_distance_imd: source measure has empty support");
    double total = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point* s : support) best = std::min(best, euclidean_distance(target.point(i), *s));
        total += target.weight(i) * best;
    }
    return total;
}

PerClassProblem per_class_problem(const DiscreteMeasure& target, const LabeledDataset& source) {
    auto dec = class_conditionals(source);
    PerClassProblem out;
    for (const auto& cond : dec.conditionals) out.costs.push_back(cost_matrix(target.points(), cond.points()));
    out.conditionals = std::move(dec.conditionals);
    out.proportions = std::move(dec.proportions);
    out.members = std::move(dec.members);
    return out;
}

DiscreteMeasure relaxed_source(const std::vector<DiscreteMeasure>& conditionals, std::span<const double> proportions,
                               std::span<const double> beta) {
    if (proportions.size() != conditionals.size() || beta.size() != conditionals.size())
        throw Error("relaxed_source: one proportion and one beta per class required");
    std::vector<Point> pts;
    std::vector<double> w;
    for (std::size_t k = 0; k < conditionals.size(); ++k) {
        if (beta[k] < 0.0) throw Error("relaxed_source: beta must be >= 0");
        for (std::size_t j = 0; j < conditionals[k].size(); ++j) {
            pts.push_back(conditionals[k].point(j));
            w.push_back((proportions[k] + beta[k]) * conditionals[k].weight(j));
        }
    }
    return {std::move(pts), std::move(w)};
}

}  // namespace imd::ot
