#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "imd/datagen.hpp"
#include "imd/measures.hpp"
#include "imd/transport.hpp"

namespace imd {

/// argmax over classes of P Y_s per target row; ties go to the smallest
/// class. Rows with total mass below 1e-12 throw.
std::vector<int> propagate_labels(const Matrix& plan, std::span<const int> source_labels, int num_classes);

/// Per-class blocks are scattered back to dataset column order first.
std::vector<int> propagate_labels(const ot::TransportPlanSet& plans,
                                  const std::vector<std::vector<std::size_t>>& members,
                                  std::span<const int> source_labels, int num_classes);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

enum class SweepMode { global, split, both };

std::string to_string(SweepMode mode);
SweepMode sweep_mode_from_string(const std::string& s);

/// One (draw, beta, mode) cell. Missing values mean the solve failed.
struct SweepRecord {
    std::size_t draw = 0;
    std::uint64_t seed = 0;
    double beta = 0.0;
    std::string mode;
    std::optional<double> accuracy;
    std::optional<double> objective;
    double solve_ms = 0.0;
    std::string diagnostic;
};

struct SweepSummaryRow {
    double beta = 0.0;
    /// Lower median (order statistic floor((n-1)/2)) of split - global accuracy.
    double median_diff = 0.0;
    double min_diff = 0.0;
    double max_diff = 0.0;
    /// Draws where both modes succeeded.
    std::size_t paired = 0;
};

struct SweepResult {
    ToyConfig config;
    std::vector<double> betas;
    std::size_t draws = 0;
    SweepMode mode = SweepMode::both;
    std::vector<std::uint64_t> seeds;
    /// Draw-major, then beta, then mode (global before split).
    std::vector<SweepRecord> records;
    /// Empty unless mode is both.
    std::vector<SweepSummaryRow> summary;

    std::size_t failures() const;
};

/// Draw d uses seed substream_seed(config.seed, d); draws run on `jobs`
/// threads (0 = hardware concurrency) and are gathered in draw order.
SweepResult run_sweep(const ToyConfig& config, std::span<const double> betas, std::size_t draws, SweepMode mode,
                      unsigned jobs = 0);

/// Summary rows recomputed from a record list.
std::vector<SweepSummaryRow> summarize(std::span<const SweepRecord> records, std::span<const double> betas);

std::vector<double> default_beta_grid(double theta_deg);

/// `draw,seed,beta,mode,accuracy,objective,solve_ms`; missing values are NA.
/// Timings are written as NA unless requested so reruns stay byte-identical.
void write_records_csv(std::ostream& os, const SweepResult& result, bool with_timings = false);
/// `beta,median_diff,min_diff,max_diff`.
void write_summary_csv(std::ostream& os, const SweepResult& result);

/// Shortest round-trip decimal form.
std::string format_number(double x);

}  // namespace imd
