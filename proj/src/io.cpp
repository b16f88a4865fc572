#include "imd/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "imd/experiments.hpp"

namespace imd::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, std::size_t line) {
    const std::string t = trim(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v))
        throw Error("dataset csv line " + std::to_string(line) + ": bad number '" + t + "'");
    return v;
}

}  // namespace

void write_dataset_csv(std::ostream& os, const LabeledDataset& data) {
    const std::size_t d = data.dimension();
    for (std::size_t c = 0; c < d; ++c) os << 'x' << c + 1 << ',';
    os << "label\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double x : data.points()[i]) os << format_number(x) << ',';
        os << data.labels()[i] + 1 << '\n';
    }
}

LabeledDataset read_dataset_csv(std::istream& is, std::optional<int> num_classes) {
    std::string line;
    if (!std::getline(is, line)) throw Error("dataset csv: missing header");
    const auto header = split(trim(line), ',');
    if (header.size() < 2 || trim(header.back()) != "label")
        throw Error("dataset csv: header must be x1,...,xD,label");
    for (std::size_t c = 0; c + 1 < header.size(); ++c)
        if (trim(header[c]) != "x" + std::to_string(c + 1)) throw Error("dataset csv: unexpected column '" + header[c] + "'");
    const std::size_t d = header.size() - 1;
    std::vector<Point> pts;
    std::vector<int> labels;
    std::size_t lineno = 1;
    int top = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split(trim(line), ',');
        if (cells.size() != d + 1)
            throw Error("dataset csv line " + std::to_string(lineno) + ": expected " + std::to_string(d + 1) + " fields");
        Point p(d);
        for (std::size_t c = 0; c < d; ++c) p[c] = parse_double(cells[c], lineno);
        const double lv = parse_double(cells[d], lineno);
        if (lv != std::floor(lv) || lv < 1.0)
            throw Error("dataset csv line " + std::to_string(lineno) + ": labels are positive integers");
        const int y = static_cast<int>(lv);
        top = std::max(top, y);
        pts.push_back(std::move(p));
        labels.push_back(y - 1);
    }
    const int k = num_classes.value_or(top);
    if (top > k) throw Error("dataset csv: label exceeds the class count");
    return LabeledDataset(std::move(pts), std::move(labels), k);
}

json measure_to_json(const DiscreteMeasure& m) { return json{{"points", m.points()}, {"weights", m.weights()}}; }

DiscreteMeasure measure_from_json(const json& j) {
    try {
        return DiscreteMeasure(j.at("points").get<std::vector<Point>>(), j.at("weights").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw Error(std::string("measure json: ") + e.what());
    }
}

CapacityReport capacity_report(const Matrix& plan, std::span<const double> capacity, double tol) {
    if (capacity.size() != plan.cols()) throw Error("capacity_report: one capacity per column expected");
    CapacityReport r;
    r.capacity.assign(capacity.begin(), capacity.end());
    r.used = plan.col_sums();
    r.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < capacity.size(); ++j) {
        const double slack = capacity[j] - r.used[j];
        r.min_slack = std::min(r.min_slack, slack);
        if (slack <= tol) ++r.saturated;
    }
    if (capacity.empty()) r.min_slack = 0.0;
    return r;
}

std::vector<double> global_capacities(const DiscreteMeasure& source, double beta) {
    std::vector<double> c(source.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = (1.0 + beta) * source.weight(j);
    return c;
}

std::vector<double> per_class_capacities(const ot::PerClassProblem& pc, std::span<const double> beta,
                                         std::size_t n_source) {
    if (beta.size() != pc.conditionals.size()) throw Error("per_class_capacities: one beta per class expected");
    std::vector<double> c(n_source, 0.0);
    for (std::size_t k = 0; k < pc.conditionals.size(); ++k)
        for (std::size_t j = 0; j < pc.members[k].size(); ++j)
            c.at(pc.members[k][j]) = (pc.proportions[k] + beta[k]) * pc.conditionals[k].weight(j);
    return c;
}

json triplets(const Matrix& plan, double tol) {
    json out = json::array();
    for (std::size_t i = 0; i < plan.rows(); ++i)
        for (std::size_t j = 0; j < plan.cols(); ++j)
            if (plan(i, j) > tol) out.push_back(json::array({i, j, plan(i, j)}));
    return out;
}

namespace {

json capacity_json(const CapacityReport& r) {
    json cols = json::array();
    for (std::size_t j = 0; j < r.capacity.size(); ++j)
        cols.push_back({{"source_idx", j}, {"capacity", r.capacity[j]}, {"used", r.used[j]},
                        {"slack", r.capacity[j] - r.used[j]}});
    return {{"min_slack", r.min_slack}, {"saturated_columns", r.saturated}, {"columns", cols}};
}

}  // namespace

json global_plan_to_json(const ot::TransportResult& r, double beta, std::span<const double> capacity) {
    return {{"mode", "global"},
            {"beta", beta},
            {"objective", r.value},
            {"shape", {r.plan.rows(), r.plan.cols()}},
            {"triplets", triplets(r.plan)},
            {"capacity", capacity_json(capacity_report(r.plan, capacity))}};
}

json plan_set_to_json(const ot::TransportPlanSet& r, const std::string& mode, const ot::PerClassProblem& pc,
                      std::size_t n_source) {
    json blocks = json::array();
    for (std::size_t k = 0; k < r.plans.size(); ++k) {
        json trip = json::array();
        const Matrix& p = r.plans[k];
        for (std::size_t i = 0; i < p.rows(); ++i)
            for (std::size_t j = 0; j < p.cols(); ++j)
                if (p(i, j) > 1e-15) trip.push_back(json::array({i, pc.members[k][j], p(i, j)}));
        blocks.push_back({{"class", k + 1}, {"beta", r.beta[k]}, {"triplets", trip}});
    }
    const Matrix full = r.to_dataset_order(pc.members, n_source);
    const auto caps = per_class_capacities(pc, r.beta, n_source);
    return {{"mode", mode},
            {"beta", r.beta},
            {"objective", r.objective},
            {"shape", {full.rows(), full.cols()}},
            {"classes", blocks},
            {"capacity", capacity_json(capacity_report(full, caps))}};
}

json imd_result_to_json(const ImdResult& r, const std::vector<Point>& ground) {
    return {{"value", r.value},
            {"argmax", r.argmax},
            {"ground_points", ground},
            {"family_size_scanned", r.family_size_scanned}};
}

json config_to_json(const ToyConfig& c) {
    return {{"k", c.num_classes},       {"n_source", c.n_source}, {"n_target", c.n_target},
            {"sigma", c.sigma},         {"eta", c.eta},           {"theta_deg", c.theta_deg},
            {"seed", c.seed}};
}

ToyConfig config_from_json(const json& j, ToyConfig base) {
    if (!j.is_object()) throw Error("config: expected an object");
    auto num = [](const json& v, const std::string& key) {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == s.size() && !s.empty()) return x;
        }
        throw Error("config: '" + key + "' must be a number");
    };
    auto count = [&](const json& v, const std::string& key) {
        const double x = num(v, key);
        if (x < 0 || x != std::floor(x)) throw Error("config: '" + key + "' must be a nonnegative integer");
        return x;
    };
    for (const auto& [key, v] : j.items()) {
        if (key == "k")
            base.num_classes = static_cast<int>(count(v, key));
        else if (key == "n") {
            base.n_source = base.n_target = static_cast<std::size_t>(count(v, key));
        } else if (key == "n_source")
            base.n_source = static_cast<std::size_t>(count(v, key));
        else if (key == "n_target")
            base.n_target = static_cast<std::size_t>(count(v, key));
        else if (key == "sigma")
            base.sigma = num(v, key);
        else if (key == "eta")
            base.eta = num(v, key);
        else if (key == "theta" || key == "theta_deg")
            base.theta_deg = num(v, key);
        else if (key == "seed") {
            if (v.is_number_unsigned())
                base.seed = v.get<std::uint64_t>();
            else if (v.is_string())
                base.seed = std::stoull(v.get<std::string>());
            else
                base.seed = static_cast<std::uint64_t>(count(v, key));
        } else
            throw Error("config: unknown key '" + key + "'");
    }
    return base;
}

json parse_key_value(std::istream& is) {
    json out = json::object();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

}  // namespace

std::string render_svg(const LabeledDataset& source, const LabeledDataset& target, const std::vector<SvgLayer>& layers,
                       double mass_tol) {
    if (source.dimension() != 2 || target.dimension() != 2) throw Error("render_svg: needs 2-dimensional points");
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto* d : {&source, &target})
        for (const auto& p : d->points()) {
            lo_x = std::min(lo_x, p[0]);
            hi_x = std::max(hi_x, p[0]);
            lo_y = std::min(lo_y, p[1]);
            hi_y = std::max(hi_y, p[1]);
        }
    const double size = 640.0, margin = 20.0;
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
    const double scale = (size - 2 * margin) / span;
    auto sx = [&](double x) { return margin + (x - lo_x) * scale; };
    auto sy = [&](double y) { return size - margin - (y - lo_y) * scale; };
    auto color = [](int y) { return kPalette[static_cast<std::size_t>(y) % std::size(kPalette)]; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
       << size << ' ' << size << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& layer : layers) {
        if (!layer.plan) continue;
        const Matrix& p = *layer.plan;
        if (p.rows() != target.size() || p.cols() != source.size()) throw Error("render_svg: plan shape mismatch");
        double top = 0.0;
        for (double v : p.data()) top = std::max(top, v);
        os << "<g class=\"" << (layer.label.empty() ? "plan" : layer.label) << "\" stroke=\"black\" stroke-width=\"1\""
           << (layer.dotted ? " stroke-dasharray=\"2,3\"" : "") << ">\n";
        for (std::size_t i = 0; i < p.rows(); ++i)
            for (std::size_t j = 0; j < p.cols(); ++j) {
                if (p(i, j) <= mass_tol) continue;
                const auto& a = target.points()[i];
                const auto& b = source.points()[j];
                os << "<line x1=\"" << fmt(sx(a[0])) << "\" y1=\"" << fmt(sy(a[1])) << "\" x2=\"" << fmt(sx(b[0]))
                   << "\" y2=\"" << fmt(sy(b[1])) << "\" stroke-opacity=\"" << fmt(0.15 + 0.85 * p(i, j) / top)
                   << "\"/>\n";
            }
        os << "</g>\n";
    }
    for (std::size_t j = 0; j < source.size(); ++j) {
        const auto& b = source.points()[j];
        os << "<circle cx=\"" << fmt(sx(b[0])) << "\" cy=\"" << fmt(sy(b[1])) << "\" r=\"3.5\" fill=\""
           << color(source.labels()[j]) << "\"/>\n";
    }
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double x = sx(target.points()[i][0]), y = sy(target.points()[i][1]);
        os << "<polygon points=\"" << fmt(x) << ',' << fmt(y - 4.5) << ' ' << fmt(x - 4) << ',' << fmt(y + 3) << ' '
           << fmt(x + 4) << ',' << fmt(y + 3) << "\" fill=\"none\" stroke=\"" << color(target.labels()[i])
           << "\" stroke-width=\"1.2\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace imd::io
