// Batch front door: load a scenario, run simulator + filter, write trace.csv
// and report.json, optionally certify against the brute-force oracles.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "minplus/minplus.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

minplus::PruneConfig parse_prune_flag(const std::string& flag) {
    if (flag == "exact") return {minplus::PruneMode::Exact, 0};
    if (flag == "off") return {minplus::PruneMode::Off, 0};
    if (flag.rfind("cap:", 0) == 0) {
        const std::size_t cap = std::stoul(flag.substr(4));
        if (cap == 0) throw minplus::ScenarioError("--prune cap must be positive");
        return {minplus::PruneMode::Capped, cap};
    }
    throw minplus::ScenarioError("--prune expects exact, off or cap:N");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Min-plus deterministic filter with optimal sensor selection"};
    std::string config_path;
    std::string out_dir = ".";
    std::int64_t seed_override = -1;
    bool certify = false;
    std::string prune_flag;
    bool quiet = false;

    app.add_option("--config", config_path, "Scenario configuration file (JSON)")
        ->required();
    app.add_option("--out", out_dir, "Output directory for trace.csv and report.json");
    app.add_option("--seed", seed_override, "Override the scenario seed");
    app.add_flag("--certify", certify, "Run the oracle certification suite");
    app.add_option("--prune", prune_flag, "Pruning mode: exact, off or cap:N");
    app.add_flag("--quiet", quiet, "Suppress per-step output");
    CLI11_PARSE(app, argc, argv);

    minplus::ScenarioConfig scenario;
    try {
        scenario = minplus::load_scenario(config_path);
        if (seed_override >= 0) scenario.seed = static_cast<std::uint64_t>(seed_override);
        if (!prune_flag.empty()) scenario.prune = parse_prune_flag(prune_flag);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        for (const std::string& w :
             minplus::observability_warnings(scenario.system.A_f, scenario.sensors))
            std::cerr << "warning: " << w << "\n";

        const minplus::MeasurementTrace trace = minplus::simulate(scenario);
        minplus::Filter filter(scenario.system, scenario.sensors, scenario.L,
                               scenario.x0_assumed, scenario.prune);
        const std::vector<minplus::EstimateReport> reports = filter.run(trace.frames);

        if (!quiet) {
            for (const minplus::EstimateReport& r : reports) {
                const Eigen::VectorXd& xt = trace.x_true.at(static_cast<std::size_t>(r.k));
                std::cout << "k=" << r.k << " x_est=" << r.x_est.transpose()
                          << " x_true=" << xt.transpose() << " sensor=" << r.active_sensor
                          << " v_min=" << r.v_min << " terms=" << r.term_count_pre_prune
                          << "/" << r.term_count_post_prune << "\n";
            }
        }

        std::filesystem::create_directories(out_dir);
        {
            std::ofstream csv(std::filesystem::path(out_dir) / "trace.csv");
            minplus::write_trace_csv(csv, scenario, trace, reports);
        }
        nlohmann::json report = minplus::report_to_json(scenario, trace, reports);

        bool certs_pass = true;
        if (certify) {
            const std::vector<minplus::Certificate> certs =
                minplus::certify_scenario(scenario, trace);
            nlohmann::json cj = nlohmann::json::array();
            for (const minplus::Certificate& c : certs) {
                cj.push_back(c.to_json());
                certs_pass = certs_pass && c.pass;
                if (!quiet)
                    std::cout << "certificate " << c.name << ": "
                              << (c.pass ? "pass" : "FAIL") << " (max error "
                              << c.max_error << ", tolerance " << c.tolerance << ")\n";
            }
            report["certificates"] = std::move(cj);
        }
        {
            std::ofstream js(std::filesystem::path(out_dir) / "report.json");
            js << report.dump(2) << "\n";
        }
        if (!certs_pass) {
            std::cerr << "certification failed\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericError;
    }
    return 0;
}
