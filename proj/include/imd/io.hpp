#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "imd/datagen.hpp"
#include "imd/discrepancy.hpp"
#include "imd/measures.hpp"
#include "imd/transport.hpp"

namespace imd::io {

using nlohmann::json;

/// Header `x1,...,xD,label`, labels 1-based in the file.
void write_dataset_csv(std::ostream& os, const LabeledDataset& data);
/// num_classes defaults to the largest label present.
LabeledDataset read_dataset_csv(std::istream& is, std::optional<int> num_classes = std::nullopt);

json measure_to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const json& j);

/// Column capacity audit: cap_j, used_j = column sum, slack = cap - used.
struct CapacityReport {
    std::vector<double> capacity;
    std::vector<double> used;
    double min_slack = 0.0;
    std::size_t saturated = 0;
};

CapacityReport capacity_report(const Matrix& plan, std::span<const double> capacity, double tol = 1e-9);

/// Column capacities (1+beta) s_j.
std::vector<double> global_capacities(const DiscreteMeasure& source, double beta);
/// Capacities (p_k + beta_k) w_kj scattered to dataset order.
std::vector<double> per_class_capacities(const ot::PerClassProblem& pc, std::span<const double> beta,
                                         std::size_t n_source);

/// Sparse triplets [target_idx, source_idx, mass] for entries above tol.
json triplets(const Matrix& plan, double tol = 1e-15);

json global_plan_to_json(const ot::TransportResult& r, double beta, std::span<const double> capacity);
/// One triplet block per class with source indices in dataset order.
json plan_set_to_json(const ot::TransportPlanSet& r, const std::string& mode, const ot::PerClassProblem& pc,
                      std::size_t n_source);

json imd_result_to_json(const ImdResult& r, const std::vector<Point>& ground);

json config_to_json(const ToyConfig& c);
/// Applies known keys onto `base`; unknown keys throw.
ToyConfig config_from_json(const json& j, ToyConfig base = {});
/// key=value lines, '#' comments.
json parse_key_value(std::istream& is);

struct SvgLayer {
    const Matrix* plan = nullptr;
    bool dotted = false;
    std::string label;
};

/// Source circles and target triangles colored by class, one segment per
/// coupled pair with opacity proportional to mass.
std::string render_svg(const LabeledDataset& source, const LabeledDataset& target, const std::vector<SvgLayer>& layers,
                       double mass_tol = 1e-12);

}  // namespace imd::io
