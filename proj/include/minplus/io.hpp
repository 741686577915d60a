// trace.csv / report.json writers and the csv reader used for round-trip
// checks. Doubles are printed with 17 significant digits so re-parsing is
// exact.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minplus/filter.hpp"
#include "minplus/scenario.hpp"
#include "minplus/simulator.hpp"

namespace minplus {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string trace_csv_header(const ScenarioConfig& scenario) {
    const Eigen::Index n = scenario.state_dim();
    std::ostringstream os;
    os << "k";
    auto vec_cols = [&](const std::string& stem) {
        if (n == 1) os << "," << stem;
        else for (Eigen::Index i = 0; i < n; ++i) os << "," << stem << "_" << i + 1;
    };
    vec_cols("x_true");
    vec_cols("x_est");
    os << ",err,active_sensor,v_min,terms_pre,terms_post";
    for (std::size_t j = 0; j < scenario.sensors.count(); ++j) {
        const Eigen::Index m = scenario.sensors.sensors[j].C_nominal.rows();
        if (m == 1) os << ",y_" << j + 1;
        else for (Eigen::Index i = 0; i < m; ++i) os << ",y_" << j + 1 << "_" << i + 1;
    }
    return os.str();
}

inline void write_trace_csv(std::ostream& out, const ScenarioConfig& scenario,
                            const MeasurementTrace& trace,
                            const std::vector<EstimateReport>& reports) {
    out << trace_csv_header(scenario) << "\n";
    for (const EstimateReport& r : reports) {
        const std::size_t k = static_cast<std::size_t>(r.k);
        const Eigen::VectorXd& xt = trace.x_true.at(k);
        out << r.k;
        for (Eigen::Index i = 0; i < xt.size(); ++i) out << "," << format_double(xt(i));
        for (Eigen::Index i = 0; i < r.x_est.size(); ++i) out << "," << format_double(r.x_est(i));
        out << "," << format_double((r.x_est - xt).norm());
        out << "," << r.active_sensor;
        out << "," << format_double(r.v_min);
        out << "," << r.term_count_pre_prune << "," << r.term_count_post_prune;
        for (const Eigen::VectorXd& y : trace.frames.at(k - 1).y)
            for (Eigen::Index i = 0; i < y.size(); ++i) out << "," << format_double(y(i));
        out << "\n";
    }
}

struct TraceCsv {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    double at(std::size_t row, const std::string& column) const {
        for (std::size_t c = 0; c < columns.size(); ++c)
            if (columns[c] == column) return rows.at(row).at(c);
        throw std::out_of_range("TraceCsv: no column named " + column);
    }
};

inline TraceCsv read_trace_csv(std::istream& in) {
    TraceCsv csv;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_trace_csv: empty stream");
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) csv.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream rs(line);
        std::vector<double> row;
        for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::stod(cell));
        if (row.size() != csv.columns.size())
            throw std::runtime_error("read_trace_csv: row width mismatch");
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline nlohmann::json report_to_json(const ScenarioConfig& scenario,
                                     const MeasurementTrace& trace,
                                     const std::vector<EstimateReport>& reports) {
    nlohmann::json j;
    j["scenario"] = {
        {"system",
         {{"A_f", matrix_to_json(scenario.system.A_f)},
          {"B_f", matrix_to_json(scenario.system.B_f)},
          {"B_wf", matrix_to_json(scenario.system.B_wf)}}},
        {"weights", {{"L", matrix_to_json(scenario.L)}, {"H", matrix_to_json(scenario.sensors.H)}}},
        {"horizon", scenario.horizon},
        {"seed", scenario.seed},
        {"x0_true", vector_to_json(scenario.x0_true)},
        {"x0_assumed", vector_to_json(scenario.x0_assumed)},
    };
    nlohmann::json sensors = nlohmann::json::array();
    for (const SensorModel& s : scenario.sensors.sensors) {
        nlohmann::json sj = {{"C", matrix_to_json(s.C_nominal)}, {"noise_sigma", s.noise_sigma}};
        nlohmann::json sched = nlohmann::json::array();
        for (const auto& [from, C] : s.schedule)
            sched.push_back({{"from_step", from}, {"C", matrix_to_json(C)}});
        sj["schedule"] = std::move(sched);
        sensors.push_back(std::move(sj));
    }
    j["scenario"]["sensors"] = std::move(sensors);

    nlohmann::json steps = nlohmann::json::array();
    for (const EstimateReport& r : reports) {
        steps.push_back({{"k", r.k},
                         {"x_est", vector_to_json(r.x_est)},
                         {"x_true", vector_to_json(trace.x_true.at(static_cast<std::size_t>(r.k)))},
                         {"v_min", r.v_min},
                         {"active_sensor", r.active_sensor},
                         {"terms_pre", r.term_count_pre_prune},
                         {"terms_post", r.term_count_post_prune}});
    }
    j["steps"] = std::move(steps);
    if (!reports.empty()) {
        const EstimateReport& last = reports.back();
        j["terminal_error"] =
            (last.x_est - trace.x_true.at(static_cast<std::size_t>(last.k))).norm();
    }
    return j;
}

}  // namespace minplus
