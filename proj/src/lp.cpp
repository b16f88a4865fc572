#include "imd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "imd/measures.hpp"

namespace imd::lp {

const char* to_string(Status status) {
    switch (status) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::iteration_limit: return "iteration_limit";
        case Status::numerical_error: return "numerical_error";
    }
    return "unknown";
}

std::size_t LinearProgram::add_variable(double cost, double lower, double upper) {
    if (std::isnan(cost) || std::isnan(lower) || std::isnan(upper)) throw Error("add_variable: NaN input");
    if (lower > upper) throw Error("add_variable: lower bound exceeds upper bound");
    if (lower == kInfinity || upper == -kInfinity) throw Error("add_variable: empty domain");
    cost_.push_back(cost);
    lower_.push_back(lower);
    upper_.push_back(upper);
    return cost_.size() - 1;
}

std::size_t LinearProgram::add_constraint(std::vector<Term> terms, Relation relation, double rhs) {
    if (!std::isfinite(rhs)) throw Error("add_constraint: rhs must be finite");
    for (const auto& t : terms) {
        if (t.var >= cost_.size()) throw Error("add_constraint: unknown variable index");
        if (!std::isfinite(t.coef)) throw Error("add_constraint: coefficient must be finite");
    }
    rows_.push_back({std::move(terms), relation, rhs});
    return rows_.size() - 1;
}

void LinearProgram::set_cost(std::size_t var, double cost) { cost_.at(var) = cost; }

void LinearProgram::set_bounds(std::size_t var, double lower, double upper) {
    if (lower > upper) throw Error("set_bounds: lower bound exceeds upper bound");
    lower_.at(var) = lower;
    upper_.at(var) = upper;
}

double LinearProgram::objective(const std::vector<double>& x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < cost_.size(); ++j) v += cost_[j] * x[j];
    return v;
}

double LinearProgram::primal_residual(const std::vector<double>& x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < cost_.size(); ++j) {
        worst = std::max(worst, lower_[j] - x[j]);
        worst = std::max(worst, x[j] - upper_[j]);
    }
    for (const auto& row : rows_) {
        double lhs = 0.0;
        for (const auto& t : row.terms) lhs += t.coef * x[t.var];
        switch (row.relation) {
            case Relation::less_equal: worst = std::max(worst, lhs - row.rhs); break;
            case Relation::greater_equal: worst = std::max(worst, row.rhs - lhs); break;
            case Relation::equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
        }
    }
    return worst;
}

namespace {

// How an original variable is expressed through internal nonnegative columns:
// x = offset + sign * col (+ -1 * col2 for free variables).
struct VarMap {
    double offset = 0.0;
    double sign = 1.0;
    std::size_t col = 0;
    std::ptrdiff_t col2 = -1;
};

// min c.z  s.t.  A z = b, z >= 0, b >= 0, stored column-wise.
struct StandardForm {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<std::size_t> col_start;
    std::vector<std::size_t> row_idx;
    std::vector<double> val;
    std::vector<double> cost;
    std::vector<double> b;
    std::vector<char> artificial;
    std::vector<std::size_t> initial_basis;

    std::vector<VarMap> vars;
    std::vector<std::ptrdiff_t> row_of_constraint;
    std::vector<double> row_sign;
    double sense_factor = 1.0;
    double b_norm = 0.0;

    bool presolve_infeasible = false;
    std::string diagnostics;
};

struct Triplet {
    std::size_t row;
    std::size_t col;
    double val;
};

StandardForm build_standard_form(const LinearProgram& lp) {
    StandardForm sf;
    sf.sense_factor = lp.sense() == Sense::maximize ? -1.0 : 1.0;

    std::vector<double> cost;
    std::vector<Triplet> trip;
    std::vector<double> rhs;
    std::vector<double> slack_coef;  // 0 for equality rows

    const std::size_t nv = lp.num_variables();
    sf.vars.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        const double lo = lp.lower()[j];
        const double up = lp.upper()[j];
        const double c = sf.sense_factor * lp.cost()[j];
        VarMap& vm = sf.vars[j];
        if (std::isfinite(lo)) {
            vm.offset = lo;
            vm.sign = 1.0;
            vm.col = cost.size();
            cost.push_back(c);
        } else if (std::isfinite(up)) {
            vm.offset = up;
            vm.sign = -1.0;
            vm.col = cost.size();
            cost.push_back(-c);
        } else {
            vm.offset = 0.0;
            vm.sign = 1.0;
            vm.col = cost.size();
            cost.push_back(c);
            vm.col2 = static_cast<std::ptrdiff_t>(cost.size());
            cost.push_back(-c);
        }
    }

    std::size_t row = 0;
    sf.row_of_constraint.assign(lp.num_constraints(), -1);
    sf.row_sign.assign(lp.num_constraints(), 1.0);
    std::vector<std::pair<std::size_t, double>> acc;
    for (std::size_t r = 0; r < lp.num_constraints(); ++r) {
        const auto& con = lp.constraints()[r];
        double b = con.rhs;
        acc.clear();
        for (const auto& t : con.terms) {
            const VarMap& vm = sf.vars[t.var];
            b -= t.coef * vm.offset;
            acc.emplace_back(vm.col, t.coef * vm.sign);
            if (vm.col2 >= 0) acc.emplace_back(static_cast<std::size_t>(vm.col2), -t.coef);
        }
        std::sort(acc.begin(), acc.end(), [](auto& a, auto& c) { return a.first < c.first; });
        std::vector<std::pair<std::size_t, double>> merged;
        for (const auto& [c, v] : acc) {
            if (!merged.empty() && merged.back().first == c)
                merged.back().second += v;
            else
                merged.emplace_back(c, v);
        }
        std::erase_if(merged, [](const auto& e) { return e.second == 0.0; });
        if (merged.empty()) {
            const double tol = 1e-9 * (1.0 + std::abs(con.rhs));
            bool ok = true;
            switch (con.relation) {
                case Relation::less_equal: ok = b >= -tol; break;
                case Relation::greater_equal: ok = b <= tol; break;
                case Relation::equal: ok = std::abs(b) <= tol; break;
            }
            if (!ok) {
                sf.presolve_infeasible = true;
                sf.diagnostics = "constraint " + std::to_string(r) + " has no terms and cannot hold";
            }
            continue;
        }
        for (const auto& [c, v] : merged) trip.push_back({row, c, v});
        rhs.push_back(b);
        slack_coef.push_back(con.relation == Relation::less_equal      ? 1.0
                             : con.relation == Relation::greater_equal ? -1.0
                                                                       : 0.0);
        sf.row_of_constraint[r] = static_cast<std::ptrdiff_t>(row);
        ++row;
    }
    // finite upper bounds of shifted variables become rows z <= up - lo
    for (std::size_t j = 0; j < nv; ++j) {
        const double lo = lp.lower()[j];
        const double up = lp.upper()[j];
        if (std::isfinite(lo) && std::isfinite(up)) {
            trip.push_back({row, sf.vars[j].col, 1.0});
            rhs.push_back(up - lo);
            slack_coef.push_back(1.0);
            ++row;
        }
    }

    sf.m = row;
    std::vector<double> sign(sf.m, 1.0);
    for (std::size_t i = 0; i < sf.m; ++i) {
        if (rhs[i] < 0.0) sign[i] = -1.0;
    }
    for (auto& t : trip) t.val *= sign[t.row];
    for (std::size_t i = 0; i < sf.m; ++i) {
        rhs[i] *= sign[i];
        slack_coef[i] *= sign[i];
    }
    for (std::size_t r = 0; r < lp.num_constraints(); ++r) {
        if (sf.row_of_constraint[r] >= 0) sf.row_sign[r] = sign[static_cast<std::size_t>(sf.row_of_constraint[r])];
    }

    sf.initial_basis.assign(sf.m, 0);
    const std::size_t n_struct = cost.size();
    for (std::size_t i = 0; i < sf.m; ++i) {
        if (slack_coef[i] != 0.0) {
            trip.push_back({i, cost.size(), slack_coef[i]});
            if (slack_coef[i] > 0.0) sf.initial_basis[i] = cost.size();
            cost.push_back(0.0);
        }
    }
    sf.artificial.assign(cost.size(), 0);
    for (std::size_t i = 0; i < sf.m; ++i) {
        if (!(slack_coef[i] > 0.0)) {
            trip.push_back({i, cost.size(), 1.0});
            sf.initial_basis[i] = cost.size();
            cost.push_back(0.0);
            sf.artificial.push_back(1);
        }
    }
    (void)n_struct;

    sf.n = cost.size();
    sf.cost = std::move(cost);
    sf.b = std::move(rhs);
    for (double v : sf.b) sf.b_norm = std::max(sf.b_norm, std::abs(v));

    std::stable_sort(trip.begin(), trip.end(), [](const Triplet& a, const Triplet& c) { return a.col < c.col; });
    sf.col_start.assign(sf.n + 1, 0);
    for (const auto& t : trip) ++sf.col_start[t.col + 1];
    for (std::size_t j = 0; j < sf.n; ++j) sf.col_start[j + 1] += sf.col_start[j];
    sf.row_idx.resize(trip.size());
    sf.val.resize(trip.size());
    for (std::size_t k = 0; k < trip.size(); ++k) {
        sf.row_idx[k] = trip[k].row;
        sf.val[k] = trip[k].val;
    }
    return sf;
}

class Engine {
  public:
    Engine(const StandardForm& sf, const SolverOptions& opt) : sf_(sf), opt_(opt), m_(sf.m), n_(sf.n) {
        basis_ = sf.initial_basis;
        pos_.assign(n_, -1);
        for (std::size_t i = 0; i < m_; ++i) pos_[basis_[i]] = static_cast<std::ptrdiff_t>(i);
        binv_.assign(m_ * m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
        xb_ = sf.b;
        y_.assign(m_, 0.0);
        alpha_.assign(m_, 0.0);
        weight_.assign(n_, 1.0);
        d_.assign(n_, 0.0);
        arow_.assign(n_, 0.0);
        in_row_.assign(n_, 0);
        row_start_.assign(m_ + 1, 0);
        for (std::size_t k = 0; k < sf.row_idx.size(); ++k) ++row_start_[sf.row_idx[k] + 1];
        for (std::size_t i = 0; i < m_; ++i) row_start_[i + 1] += row_start_[i];
        col_idx_.resize(sf.row_idx.size());
        row_val_.resize(sf.row_idx.size());
        std::vector<std::size_t> fill(row_start_.begin(), row_start_.end() - 1);
        for (std::size_t j = 0; j < n_; ++j) {
            for (std::size_t k = sf.col_start[j]; k < sf.col_start[j + 1]; ++k) {
                const std::size_t at = fill[sf.row_idx[k]]++;
                col_idx_[at] = j;
                row_val_[at] = sf.val[k];
            }
        }
        max_iter_ = opt.max_iterations ? opt.max_iterations : 50 * (m_ + n_) + 1000;
        feas_tol_ = opt.feasibility_tol * (1.0 + sf.b_norm);
    }

    Status phase_one() {
        std::vector<double> c(n_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) c[j] = sf_.artificial[j] ? 1.0 : 0.0;
        Status st = run(c, true);
        if (st != Status::optimal) return st;
        double infeas = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            if (sf_.artificial[basis_[i]]) infeas += std::max(0.0, xb_[i]);
        if (infeas > feas_tol_) {
            diag_ = "phase one ended with artificial mass " + std::to_string(infeas);
            return Status::infeasible;
        }
        drive_out_artificials();
        return Status::optimal;
    }

    Status phase_two() {
        std::fill(weight_.begin(), weight_.end(), 1.0);
        return run(sf_.cost, false);
    }

    std::size_t iterations() const { return iter_; }
    const std::string& diagnostics() const { return diag_; }
    const std::vector<double>& duals() const { return y_; }
    double dual_residual() const { return dual_residual_; }

    std::vector<double> primal() const {
        std::vector<double> z(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) z[basis_[i]] = std::max(0.0, xb_[i]);
        return z;
    }

  private:
    double reduced_cost(const std::vector<double>& c, std::size_t j) const {
        double d = c[j];
        for (std::size_t k = sf_.col_start[j]; k < sf_.col_start[j + 1]; ++k) d -= y_[sf_.row_idx[k]] * sf_.val[k];
        return d;
    }

    void compute_alpha(std::size_t q) {
        std::fill(alpha_.begin(), alpha_.end(), 0.0);
        for (std::size_t k = sf_.col_start[q]; k < sf_.col_start[q + 1]; ++k) {
            const std::size_t r = sf_.row_idx[k];
            const double v = sf_.val[k];
            for (std::size_t i = 0; i < m_; ++i) alpha_[i] += binv_[i * m_ + r] * v;
        }
    }

    void compute_duals(const std::vector<double>& c) {
        std::fill(y_.begin(), y_.end(), 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = c[basis_[i]];
            if (cb == 0.0) continue;
            const double* row = &binv_[i * m_];
            for (std::size_t r = 0; r < m_; ++r) y_[r] += cb * row[r];
        }
    }

    // Rebuilds the inverse from scratch with partial pivoting.
    bool refactor() {
        std::vector<double> b(m_ * m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t j = basis_[i];
            for (std::size_t k = sf_.col_start[j]; k < sf_.col_start[j + 1]; ++k) b[sf_.row_idx[k] * m_ + i] = sf_.val[k];
        }
        std::vector<double> inv(m_ * m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
        for (std::size_t col = 0; col < m_; ++col) {
            std::size_t piv = col;
            double best = std::abs(b[col * m_ + col]);
            for (std::size_t r = col + 1; r < m_; ++r) {
                const double v = std::abs(b[r * m_ + col]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (best < 1e-13) {
                diag_ = "singular basis at column " + std::to_string(col) + " during refactorization";
                return false;
            }
            if (piv != col) {
                std::swap_ranges(b.begin() + piv * m_, b.begin() + (piv + 1) * m_, b.begin() + col * m_);
                std::swap_ranges(inv.begin() + piv * m_, inv.begin() + (piv + 1) * m_, inv.begin() + col * m_);
            }
            const double s = 1.0 / b[col * m_ + col];
            for (std::size_t k = col; k < m_; ++k) b[col * m_ + k] *= s;
            for (std::size_t k = 0; k < m_; ++k) inv[col * m_ + k] *= s;
            for (std::size_t r = 0; r < m_; ++r) {
                if (r == col) continue;
                const double f = b[r * m_ + col];
                if (f == 0.0) continue;
                for (std::size_t k = col; k < m_; ++k) b[r * m_ + k] -= f * b[col * m_ + k];
                for (std::size_t k = 0; k < m_; ++k) {
                    const double v = inv[col * m_ + k];
                    if (v != 0.0) inv[r * m_ + k] -= f * v;
                }
            }
        }
        binv_ = std::move(inv);
        for (std::size_t i = 0; i < m_; ++i) {
            double v = 0.0;
            const double* row = &binv_[i * m_];
            for (std::size_t r = 0; r < m_; ++r) v += row[r] * sf_.b[r];
            xb_[i] = v;
        }
        since_refactor_ = 0;
        return true;
    }

    // Basic columns, and artificials outside phase one, are stored as 0 so
    // pricing never selects them.
    void compute_reduced_costs(const std::vector<double>& c, bool phase_one) {
        for (std::size_t j = 0; j < n_; ++j)
            d_[j] = pos_[j] >= 0 || (!phase_one && sf_.artificial[j]) ? 0.0 : reduced_cost(c, j);
    }

    // Row r of B^-1 A over the nonbasic columns, built row-wise from the
    // nonzeros of row r of the inverse.
    void compute_pivot_row(std::size_t r) {
        for (std::size_t j : touched_) {
            arow_[j] = 0.0;
            in_row_[j] = 0;
        }
        touched_.clear();
        const double* rho = &binv_[r * m_];
        for (std::size_t i = 0; i < m_; ++i) {
            const double v = rho[i];
            if (v == 0.0) continue;
            for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
                const std::size_t j = col_idx_[k];
                if (pos_[j] >= 0) continue;
                if (!in_row_[j]) {
                    in_row_[j] = 1;
                    touched_.push_back(j);
                }
                arow_[j] += v * row_val_[k];
            }
        }
    }

    // Reduced costs and reference-framework weights after pivoting q in at row r.
    void update_pricing(std::size_t r, std::size_t q, double dq, bool devex, bool phase_one) {
        const double arq = alpha_[r];
        const double wq = weight_[q];
        const double step = dq / arq;
        for (std::size_t j : touched_) {
            if (j == q || (!phase_one && sf_.artificial[j])) continue;
            const double a = arow_[j];
            d_[j] -= step * a;
            if (devex) {
                const double ratio = a / arq;
                weight_[j] = std::max(weight_[j], ratio * ratio * wq);
            }
        }
        const std::size_t leaving = basis_[r];
        d_[q] = 0.0;
        d_[leaving] = !phase_one && sf_.artificial[leaving] ? 0.0 : -step;
        if (devex) {
            weight_[leaving] = std::max(wq / (arq * arq), 1.0);
            if (wq > 1e8) std::fill(weight_.begin(), weight_.end(), 1.0);
        }
    }

    void pivot(std::size_t r, std::size_t q, double theta) {
        for (std::size_t i = 0; i < m_; ++i) xb_[i] -= theta * alpha_[i];
        xb_[r] = theta;
        double* prow = &binv_[r * m_];
        const double inv = 1.0 / alpha_[r];
        for (std::size_t k = 0; k < m_; ++k) prow[k] *= inv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double a = alpha_[i];
            if (a == 0.0) continue;
            double* row = &binv_[i * m_];
            for (std::size_t k = 0; k < m_; ++k) row[k] -= a * prow[k];
        }
        pos_[basis_[r]] = -1;
        basis_[r] = q;
        pos_[q] = static_cast<std::ptrdiff_t>(r);
        ++since_refactor_;
    }

    Status run(const std::vector<double>& c, bool phase_one) {
        compute_duals(c);
        compute_reduced_costs(c, phase_one);
        bool bland = false;
        std::size_t degenerate_streak = 0;
        bool verified = false;
        for (;;) {
            if (iter_ >= max_iter_) {
                diag_ = "iteration limit " + std::to_string(max_iter_) + " reached";
                return Status::iteration_limit;
            }
            if (since_refactor_ >= opt_.refactor_interval) {
                if (!refactor()) return Status::numerical_error;
                compute_duals(c);
                compute_reduced_costs(c, phase_one);
            }

            // pricing: Devex scores d_j^2 / w_j; phase one breaks ties by true cost
            std::ptrdiff_t q = -1;
            double dq = 0.0;
            double best_score = 0.0;
            double best_cost = 0.0;
            // partial pricing over interleaved column subsets j = off (mod nseg);
            // the first subset holding a candidate supplies the best Devex score
            const double* dd = d_.data();
            const double* ww = weight_.data();
            if (bland) {
                for (std::size_t j = 0; j < n_; ++j) {
                    if (dd[j] < -opt_.optimality_tol) {
                        q = static_cast<std::ptrdiff_t>(j);
                        dq = dd[j];
                        break;
                    }
                }
            }
            const std::size_t nseg = std::clamp<std::size_t>(n_ / 1000, 1, 32);
            for (std::size_t s = 0; s < nseg && q < 0; ++s) {
                const std::size_t off = (price_start_ + s) % nseg;
                for (std::size_t j = off; j < n_; j += nseg) {
                    const double d = dd[j];
                    if (d >= -opt_.optimality_tol) continue;
                    // d^2 / w compared without dividing
                    const double lhs = d * d;
                    const double rhs = best_score * ww[j];
                    const bool better = q < 0 || lhs > rhs * (1.0 + 1e-12) ||
                                        (phase_one && lhs >= rhs * (1.0 - 1e-12) && sf_.cost[j] < best_cost);
                    if (better) {
                        best_score = lhs / ww[j];
                        best_cost = sf_.cost[j];
                        q = static_cast<std::ptrdiff_t>(j);
                        dq = d;
                    }
                }
                if (q >= 0) price_start_ = off + 1;
            }
            if (q < 0) {
                if (verified) {
                    dual_residual_ = 0.0;
                    for (std::size_t j = 0; j < n_; ++j) {
                        if (pos_[j] >= 0 || (!phase_one && sf_.artificial[j])) continue;
                        dual_residual_ = std::max(dual_residual_, -reduced_cost(c, j));
                    }
                    double worst = 0.0;
                    for (double v : xb_) worst = std::min(worst, v);
                    if (worst < -feas_tol_) {
                        diag_ = "basic solution infeasible by " + std::to_string(-worst) + " after refactorization";
                        return Status::numerical_error;
                    }
                    return Status::optimal;
                }
                if (!refactor()) return Status::numerical_error;
                compute_duals(c);
                compute_reduced_costs(c, phase_one);
                verified = true;
                continue;
            }
            verified = false;
            const auto qi = static_cast<std::size_t>(q);
            compute_alpha(qi);

            // ratio test
            std::ptrdiff_t r = -1;
            if (!phase_one) {
                double big = opt_.pivot_tol;
                for (std::size_t i = 0; i < m_; ++i) {
                    if (sf_.artificial[basis_[i]] && std::abs(alpha_[i]) > big) {
                        big = std::abs(alpha_[i]);
                        r = static_cast<std::ptrdiff_t>(i);
                    }
                }
            }
            double theta = 0.0;
            if (r < 0) {
                if (bland) {
                    double tmin = kInfinity;
                    for (std::size_t i = 0; i < m_; ++i) {
                        if (alpha_[i] <= opt_.pivot_tol) continue;
                        const double t = std::max(0.0, xb_[i]) / alpha_[i];
                        if (t < tmin - 1e-15 ||
                            (t <= tmin + 1e-15 && r >= 0 && basis_[i] < basis_[static_cast<std::size_t>(r)])) {
                            tmin = std::min(t, tmin);
                            r = static_cast<std::ptrdiff_t>(i);
                        }
                    }
                } else {
                    const double delta = 0.5 * opt_.feasibility_tol;
                    double tmax = kInfinity;
                    for (std::size_t i = 0; i < m_; ++i) {
                        if (alpha_[i] <= opt_.pivot_tol) continue;
                        tmax = std::min(tmax, (std::max(0.0, xb_[i]) + delta) / alpha_[i]);
                    }
                    double amax = 0.0;
                    for (std::size_t i = 0; i < m_; ++i) {
                        if (alpha_[i] <= opt_.pivot_tol) continue;
                        if (std::max(0.0, xb_[i]) / alpha_[i] <= tmax && alpha_[i] > amax) {
                            amax = alpha_[i];
                            r = static_cast<std::ptrdiff_t>(i);
                        }
                    }
                }
                if (r < 0) {
                    diag_ = "column " + std::to_string(qi) + " has no blocking row";
                    return Status::unbounded;
                }
                theta = std::max(0.0, xb_[static_cast<std::size_t>(r)]) / alpha_[static_cast<std::size_t>(r)];
            }
            const auto ri = static_cast<std::size_t>(r);
            compute_pivot_row(ri);
            update_pricing(ri, qi, dq, !bland, phase_one);
            pivot(ri, qi, theta);
            // y += d_q * (new pivot row of the inverse)
            const double* prow = &binv_[ri * m_];
            for (std::size_t k = 0; k < m_; ++k) y_[k] += dq * prow[k];
            ++iter_;

            if (theta * std::abs(dq) <= 1e-14) {
                if (++degenerate_streak > opt_.bland_after_degenerate) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }
        }
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (!sf_.artificial[basis_[i]]) continue;
            const double* row = &binv_[i * m_];
            std::ptrdiff_t best_j = -1;
            double best = 1e-7;
            for (std::size_t j = 0; j < n_; ++j) {
                if (pos_[j] >= 0 || sf_.artificial[j]) continue;
                double a = 0.0;
                for (std::size_t k = sf_.col_start[j]; k < sf_.col_start[j + 1]; ++k) a += row[sf_.row_idx[k]] * sf_.val[k];
                if (std::abs(a) > best) {
                    best = std::abs(a);
                    best_j = static_cast<std::ptrdiff_t>(j);
                }
            }
            if (best_j < 0) continue;  // redundant row; artificial stays basic at zero
            compute_alpha(static_cast<std::size_t>(best_j));
            pivot(i, static_cast<std::size_t>(best_j), xb_[i] / alpha_[i]);
            ++iter_;
        }
    }

    const StandardForm& sf_;
    const SolverOptions& opt_;
    std::size_t m_;
    std::size_t n_;
    std::vector<std::size_t> basis_;
    std::vector<std::ptrdiff_t> pos_;
    std::vector<double> binv_;
    std::vector<double> xb_;
    std::vector<double> y_;
    std::vector<double> alpha_;
    std::vector<double> weight_;
    std::vector<double> d_;
    std::vector<double> arow_;
    std::vector<char> in_row_;
    std::vector<std::size_t> touched_;
    std::vector<std::size_t> row_start_;
    std::vector<std::size_t> col_idx_;
    std::vector<double> row_val_;
    std::size_t iter_ = 0;
    std::size_t price_start_ = 0;
    std::size_t since_refactor_ = 0;
    std::size_t max_iter_ = 0;
    double feas_tol_ = 0.0;
    double dual_residual_ = 0.0;
    std::string diag_;
};

}  // namespace

LpSolution SimplexSolver::solve(const LinearProgram& program) {
    LpSolution sol;
    const StandardForm sf = build_standard_form(program);
    if (sf.presolve_infeasible) {
        sol.status = Status::infeasible;
        sol.diagnostics = sf.diagnostics;
        return sol;
    }
    Engine engine(sf, options_);
    Status st = engine.phase_one();
    if (st == Status::optimal) st = engine.phase_two();
    sol.iterations = engine.iterations();
    sol.diagnostics = engine.diagnostics();
    sol.status = st;
    if (st != Status::optimal) return sol;

    const auto z = engine.primal();
    sol.x.assign(program.num_variables(), 0.0);
    for (std::size_t j = 0; j < program.num_variables(); ++j) {
        const auto& vm = sf.vars[j];
        double v = vm.offset + vm.sign * z[vm.col];
        if (vm.col2 >= 0) v -= z[static_cast<std::size_t>(vm.col2)];
        sol.x[j] = v;
    }
    sol.value = program.objective(sol.x);
    sol.duals.assign(program.num_constraints(), 0.0);
    const auto& y = engine.duals();
    for (std::size_t r = 0; r < program.num_constraints(); ++r) {
        const auto row = sf.row_of_constraint[r];
        if (row >= 0) sol.duals[r] = sf.sense_factor * sf.row_sign[r] * y[static_cast<std::size_t>(row)];
    }
    sol.primal_residual = program.primal_residual(sol.x);
    sol.dual_residual = engine.dual_residual();

    double b_inf = 0.0;
    for (const auto& c : program.constraints()) b_inf = std::max(b_inf, std::abs(c.rhs));
    if (sol.primal_residual > options_.feasibility_tol * (1.0 + b_inf)) {
        std::ostringstream os;
        os << "primal residual " << sol.primal_residual << " exceeds tolerance";
        sol.status = Status::numerical_error;
        sol.diagnostics = os.str();
    } else if (sol.dual_residual > options_.feasibility_tol) {
        std::ostringstream os;
        os << "dual residual " << sol.dual_residual << " exceeds tolerance";
        sol.status = Status::numerical_error;
        sol.diagnostics = os.str();
    }
    return sol;
}

LpSolution solve(const LinearProgram& program, const SolverOptions& options) {
    return SimplexSolver(options).solve(program);
}

void write_text(std::ostream& out, const LinearProgram& program) {
    out << "SENSE " << (program.sense() == Sense::minimize ? "MIN" : "MAX") << '\n';
    out << "VARS " << program.num_variables() << '\n';
    out.precision(17);
    for (std::size_t j = 0; j < program.num_variables(); ++j)
        out << "V " << j << ' ' << program.cost()[j] << ' ' << program.lower()[j] << ' ' << program.upper()[j] << '\n';
    out << "ROWS " << program.num_constraints() << '\n';
    for (std::size_t r = 0; r < program.num_constraints(); ++r) {
        const auto& c = program.constraints()[r];
        const char* rel = c.relation == Relation::less_equal ? "LE" : c.relation == Relation::equal ? "EQ" : "GE";
        out << "R " << r << ' ' << rel << ' ' << c.rhs << ' ' << c.terms.size();
        for (const auto& t : c.terms) out << ' ' << t.var << ':' << t.coef;
        out << '\n';
    }
}

}  // namespace imd::lp
