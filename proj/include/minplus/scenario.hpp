// Scenario configuration: the experiment record driving simulator + filter.
// Loaded from a JSON file; every dimension is validated up front.
#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "minplus/system.hpp"
#include "minplus/value_function.hpp"

namespace minplus {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class NoiseModel { Uniform, Bell };

struct ScenarioConfig {
    ForwardSystem system;
    SensorSuite sensors;
    Eigen::MatrixXd L;
    int horizon = 0;
    Eigen::VectorXd x0_true;
    Eigen::VectorXd x0_assumed;
    std::vector<Eigen::VectorXd> u;  // empty means u == 0 throughout
    std::uint64_t seed = 0;
    PruneConfig prune;
    NoiseModel noise_model = NoiseModel::Uniform;
    double w_sigma = 0.0;

    // Explicit signal overrides; when set they replace the generator.
    std::optional<std::vector<Eigen::VectorXd>> explicit_w;                 // w_0..w_{N-1}
    std::optional<std::vector<std::vector<Eigen::VectorXd>>> explicit_eta; // [sensor][step 1..N]

    Eigen::Index state_dim() const { return system.state_dim(); }
    Eigen::Index input_dim() const { return system.input_dim(); }

    Eigen::VectorXd input_at(int k) const {
        if (u.empty()) return Eigen::VectorXd::Zero(input_dim());
        return u.at(static_cast<std::size_t>(k));
    }
};

namespace detail {

inline Eigen::MatrixXd parse_matrix(const nlohmann::json& j, const std::string& name) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ScenarioError(name + ": expected a row-major matrix (array of rows)");
    const std::size_t rows = j.size(), cols = j.front().size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ScenarioError(name + ": ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

inline Eigen::VectorXd parse_vector(const nlohmann::json& j, const std::string& name) {
    if (!j.is_array()) throw ScenarioError(name + ": expected an array");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) throw ScenarioError("missing required field '" + key + "'");
    return *it;
}

}  // namespace detail

inline void validate(const ScenarioConfig& s) {
    const Eigen::Index n = s.state_dim();
    if (s.horizon < 1) throw ScenarioError("horizon: must be >= 1");
    if (s.system.A_f.rows() != s.system.A_f.cols())
        throw ScenarioError("system.A_f: must be square");
    if (s.system.B_f.rows() != n || s.system.B_wf.rows() != n || s.system.B_wf.cols() != n)
        throw ScenarioError("system: B_f/B_wf row count must match state dimension");
    if (s.L.rows() != n || s.L.cols() != n)
        throw ScenarioError("weights.L: dimension mismatch with state");
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.L, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= kPdTolerance)
            throw ScenarioError("weights.L: must be positive definite");
    }
    if (s.sensors.sensors.empty()) throw ScenarioError("sensors: at least one sensor required");
    for (std::size_t j = 0; j < s.sensors.count(); ++j) {
        const SensorModel& sm = s.sensors.sensors[j];
        const std::string tag = "sensors[" + std::to_string(j) + "]";
        if (sm.C_nominal.cols() != n) throw ScenarioError(tag + ".C: column count must match state dimension");
        if (s.sensors.weight(j).rows() != sm.C_nominal.rows())
            throw ScenarioError(tag + ": weight H dimension mismatch with C rows");
        int prev = -1;
        for (const auto& [from, C_over] : sm.schedule) {
            if (from <= prev) throw ScenarioError(tag + ".schedule: from_step entries must be strictly increasing");
            if (C_over.rows() != sm.C_nominal.rows() || C_over.cols() != n)
                throw ScenarioError(tag + ".schedule: override C dimension mismatch");
            prev = from;
        }
    }
    if (s.x0_true.size() != n || s.x0_assumed.size() != n)
        throw ScenarioError("x0_true/x0_assumed: dimension mismatch with state");
    if (!s.u.empty()) {
        if (static_cast<int>(s.u.size()) < s.horizon)
            throw ScenarioError("u: needs one entry per step up to the horizon");
        for (const auto& uk : s.u)
            if (uk.size() != s.input_dim()) throw ScenarioError("u: entry dimension mismatch");
    }
    if (s.explicit_w && static_cast<int>(s.explicit_w->size()) < s.horizon)
        throw ScenarioError("noise.w: needs one entry per step up to the horizon");
    if (s.explicit_eta) {
        if (s.explicit_eta->size() != s.sensors.count())
            throw ScenarioError("noise.eta: needs one signal per sensor");
        for (const auto& sig : *s.explicit_eta)
            if (static_cast<int>(sig.size()) < s.horizon)
                throw ScenarioError("noise.eta: each signal needs one entry per step");
    }
    if (s.w_sigma < 0.0) throw ScenarioError("w_sigma: must be non-negative");
}

inline ScenarioConfig parse_scenario(const nlohmann::json& j) {
    using detail::parse_matrix;
    using detail::parse_vector;
    using detail::require;

    ScenarioConfig s;
    const nlohmann::json& sys = require(j, "system");
    s.system.A_f = parse_matrix(require(sys, "A_f"), "system.A_f");
    s.system.B_f = parse_matrix(require(sys, "B_f"), "system.B_f");
    s.system.B_wf = parse_matrix(require(sys, "B_wf"), "system.B_wf");

    const nlohmann::json& weights = require(j, "weights");
    s.L = parse_matrix(require(weights, "L"), "weights.L");
    s.sensors.H = parse_matrix(require(weights, "H"), "weights.H");

    for (const nlohmann::json& sj : require(j, "sensors")) {
        SensorModel sm;
        sm.C_nominal = parse_matrix(require(sj, "C"), "sensor C");
        sm.noise_sigma = sj.value("noise_sigma", 0.0);
        if (sj.contains("schedule"))
            for (const nlohmann::json& e : sj["schedule"])
                sm.schedule.emplace_back(require(e, "from_step").get<int>(),
                                         parse_matrix(require(e, "C"), "schedule C"));
        s.sensors.sensors.push_back(std::move(sm));
        if (sj.contains("H"))
            s.sensors.H_per_sensor.push_back(parse_matrix(sj["H"], "sensor H"));
        else
            s.sensors.H_per_sensor.push_back(std::nullopt);
    }

    s.horizon = require(j, "horizon").get<int>();
    s.x0_true = parse_vector(require(j, "x0_true"), "x0_true");
    s.x0_assumed = parse_vector(require(j, "x0_assumed"), "x0_assumed");

    if (j.contains("u") && !(j["u"].is_string() && j["u"] == "zero"))
        for (const nlohmann::json& uk : j["u"]) s.u.push_back(parse_vector(uk, "u entry"));

    s.seed = j.value("seed", std::uint64_t{0});
    s.w_sigma = j.value("w_sigma", 0.0);

    if (j.contains("noise_model")) {
        const std::string nm = j["noise_model"].get<std::string>();
        if (nm == "uniform") s.noise_model = NoiseModel::Uniform;
        else if (nm == "bell") s.noise_model = NoiseModel::Bell;
        else throw ScenarioError("noise_model: expected 'uniform' or 'bell'");
    }

    if (j.contains("prune")) {
        const nlohmann::json& p = j["prune"];
        const std::string mode = p.value("mode", "exact");
        if (mode == "exact") s.prune.mode = PruneMode::Exact;
        else if (mode == "off") s.prune.mode = PruneMode::Off;
        else if (mode == "cap") {
            s.prune.mode = PruneMode::Capped;
            s.prune.cap = p.value("cap", std::size_t{0});
            if (s.prune.cap == 0) throw ScenarioError("prune.cap: must be positive in cap mode");
        } else {
            throw ScenarioError("prune.mode: expected 'exact', 'cap' or 'off'");
        }
    }

    if (j.contains("noise")) {
        const nlohmann::json& nj = j["noise"];
        if (nj.contains("w")) {
            std::vector<Eigen::VectorXd> w;
            for (const nlohmann::json& e : nj["w"]) w.push_back(parse_vector(e, "noise.w entry"));
            s.explicit_w = std::move(w);
        }
        if (nj.contains("eta")) {
            std::vector<std::vector<Eigen::VectorXd>> eta;
            for (const nlohmann::json& sensor_sig : nj["eta"]) {
                std::vector<Eigen::VectorXd> sig;
                for (const nlohmann::json& e : sensor_sig) sig.push_back(parse_vector(e, "noise.eta entry"));
                eta.push_back(std::move(sig));
            }
            s.explicit_eta = std::move(eta);
        }
    }

    validate(s);
    return s;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(path + ": " + e.what());
    }
    return parse_scenario(j);
}

}  // namespace minplus
