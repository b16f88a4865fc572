#include "imd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <thread>

namespace imd {

std::vector<int> propagate_labels(const Matrix& plan, std::span<const int> source_labels, int num_classes) {
    if (plan.cols() != source_labels.size()) throw Error("propagate_labels: plan columns differ from source labels");
    if (num_classes < 1) throw Error("propagate_labels: need at least one class");
    std::vector<int> out(plan.rows());
    std::vector<double> votes(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < plan.rows(); ++i) {
        std::fill(votes.begin(), votes.end(), 0.0);
        double total = 0.0;
        for (std::size_t j = 0; j < plan.cols(); ++j) {
            const int y = source_labels[j];
            if (y < 0 || y >= num_classes) throw Error("propagate_labels: source label out of range");
            votes[static_cast<std::size_t>(y)] += plan(i, j);
            total += plan(i, j);
        }
        if (!(total >= 1e-12))
            throw Error("propagate_labels: target row " + std::to_string(i) + " receives no mass");
        out[i] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    return out;
}

std::vector<int> propagate_labels(const ot::TransportPlanSet& plans,
                                  const std::vector<std::vector<std::size_t>>& members,
                                  std::span<const int> source_labels, int num_classes) {
    return propagate_labels(plans.to_dataset_order(members, source_labels.size()), source_labels, num_classes);
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) throw Error("accuracy: length mismatch");
    if (truth.empty()) throw Error("accuracy: empty label vectors");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

std::string to_string(SweepMode mode) {
    switch (mode) {
        case SweepMode::global: return "global";
        case SweepMode::split: return "split";
        case SweepMode::both: return "both";
    }
    return "?";
}

SweepMode sweep_mode_from_string(const std::string& s) {
    if (s == "global") return SweepMode::global;
    if (s == "split") return SweepMode::split;
    if (s == "both") return SweepMode::both;
    throw Error("unknown sweep mode '" + s + "'");
}

std::size_t SweepResult::failures() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const SweepRecord& r) { return !r.accuracy; }));
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<SweepRecord> run_draw(const ToyConfig& base, std::size_t draw, std::uint64_t seed,
                                  std::span<const double> betas, SweepMode mode) {
    std::vector<SweepRecord> out;
    ToyConfig cfg = base;
    cfg.seed = seed;
    ToyPair pair;
    std::string setup_error;
    try {
        pair = generate_pair(cfg);
    } catch (const std::exception& e) {
        setup_error = std::string("generation failed: ") + e.what();
    }
    DiscreteMeasure t, s;
    CostMatrix cost;
    ot::PerClassProblem pc;
    if (setup_error.empty()) {
        try {
            t = empirical_measure(pair.target);
            s = empirical_measure(pair.source);
            cost = cost_matrix(pair.target.points(), pair.source.points());
            pc = ot::per_class_problem(t, pair.source);
        } catch (const std::exception& e) {
            setup_error = std::string("setup failed: ") + e.what();
        }
    }
    const int k = cfg.num_classes;
    for (double beta : betas) {
        for (SweepMode m : {SweepMode::global, SweepMode::split}) {
            if (mode != SweepMode::both && mode != m) continue;
            SweepRecord rec;
            rec.draw = draw;
            rec.seed = seed;
            rec.beta = beta;
            rec.mode = to_string(m);
            if (!setup_error.empty()) {
                rec.diagnostic = setup_error;
                out.push_back(std::move(rec));
                continue;
            }
            const auto t0 = Clock::now();
            try {
                std::vector<int> pred;
                if (m == SweepMode::global) {
                    const auto r = ot::partial_ot_global(t, s, cost, beta);
                    rec.objective = r.value;
                    pred = propagate_labels(r.plan, pair.source.labels(), k);
                } else {
                    const auto r = ot::partial_ot_beta_split(t, pc.conditionals, pc.proportions, beta, pc.costs);
                    rec.objective = r.objective;
                    pred = propagate_labels(r, pc.members, pair.source.labels(), k);
                }
                rec.accuracy = accuracy(pred, pair.target.labels());
            } catch (const std::exception& e) {
                rec.objective.reset();
                rec.accuracy.reset();
                rec.diagnostic = e.what();
            }
            rec.solve_ms = ms_since(t0);
            out.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace

std::vector<SweepSummaryRow> summarize(std::span<const SweepRecord> records, std::span<const double> betas) {
    std::vector<SweepSummaryRow> rows;
    for (double beta : betas) {
        // pair global and split cells of the same draw
        std::vector<std::pair<std::size_t, double>> g, sp;
        for (const auto& r : records) {
            if (r.beta != beta || !r.accuracy) continue;
            (r.mode == "global" ? g : sp).emplace_back(r.draw, *r.accuracy);
        }
        std::vector<double> diffs;
        for (const auto& [d, a] : sp)
            for (const auto& [d2, b] : g)
                if (d == d2) diffs.push_back(a - b);
        SweepSummaryRow row;
        row.beta = beta;
        row.paired = diffs.size();
        if (diffs.empty()) {
            row.median_diff = row.min_diff = row.max_diff = std::nan("");
        } else {
            std::sort(diffs.begin(), diffs.end());
            row.median_diff = diffs[(diffs.size() - 1) / 2];
            row.min_diff = diffs.front();
            row.max_diff = diffs.back();
        }
        rows.push_back(row);
    }
    return rows;
}

SweepResult run_sweep(const ToyConfig& config, std::span<const double> betas, std::size_t draws, SweepMode mode,
                      unsigned jobs) {
    config.validate();
    if (draws < 1) throw Error("run_sweep: draws must be >= 1");
    if (betas.empty()) throw Error("run_sweep: empty beta grid");
    for (double b : betas)
        if (!(b >= 0.0) || !std::isfinite(b)) throw Error("run_sweep: beta values must be finite and >= 0");

    SweepResult res;
    res.config = config;
    res.betas.assign(betas.begin(), betas.end());
    res.draws = draws;
    res.mode = mode;
    for (std::size_t d = 0; d < draws; ++d) res.seeds.push_back(substream_seed(config.seed, d));

    std::vector<std::vector<SweepRecord>> per_draw(draws);
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, draws));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t d; (d = next.fetch_add(1)) < draws;)
            per_draw[d] = run_draw(config, d, res.seeds[d], res.betas, mode);
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    }
    for (auto& v : per_draw)
        for (auto& r : v) res.records.push_back(std::move(r));
    if (mode == SweepMode::both) res.summary = summarize(res.records, res.betas);
    return res;
}

std::vector<double> default_beta_grid(double theta_deg) {
    std::vector<double> g;
    if (theta_deg == 0.0) {
        for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
    } else {
        for (int i = 0; i <= 6; ++i) g.push_back(i * 0.25);
    }
    return g;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "NA";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

void write_records_csv(std::ostream& os, const SweepResult& result, bool with_timings) {
    os << "draw,seed,beta,mode,accuracy,objective,solve_ms\n";
    for (const auto& r : result.records) {
        os << r.draw + 1 << ',' << r.seed << ',' << format_number(r.beta) << ',' << r.mode << ','
           << (r.accuracy ? format_number(*r.accuracy) : "NA") << ','
           << (r.objective ? format_number(*r.objective) : "NA") << ','
           << (with_timings ? format_number(r.solve_ms) : "NA") << '\n';
    }
}

void write_summary_csv(std::ostream& os, const SweepResult& result) {
    os << "beta,median_diff,min_diff,max_diff\n";
    for (const auto& row : result.summary)
        os << format_number(row.beta) << ',' << format_number(row.median_diff) << ',' << format_number(row.min_diff)
           << ',' << format_number(row.max_diff) << '\n';
}

}  // namespace imd
