#include <sstream>

#include <catch_amalgamated.hpp>

#include "minplus/filter.hpp"
#include "minplus/io.hpp"
#include "minplus/scenario.hpp"
#include "minplus/simulator.hpp"

using namespace minplus;
using Catch::Approx;

TEST_CASE("shipped failure scenario loads and validates") {
    ScenarioConfig s = load_scenario(std::string(MINPLUS_SCENARIO_DIR) + "/fig1.json");
    CHECK(s.system.A_f(0, 0) == Approx(0.7));
    CHECK(s.system.B_f(0, 0) == Approx(0.4));
    CHECK(s.system.B_wf(0, 0) == Approx(-0.7));
    CHECK(s.L(0, 0) == Approx(5.0));
    CHECK(s.sensors.H(0, 0) == Approx(3.0));
    REQUIRE(s.sensors.count() == 5);
    CHECK(s.sensors.sensors[0].C_nominal(0, 0) == Approx(1.5));
    CHECK(s.sensors.sensors[4].C_nominal(0, 0) == Approx(1.0));
    CHECK(s.sensors.sensors[0].schedule.size() == 1);
    CHECK(s.sensors.sensors[0].schedule[0].second(0, 0) == Approx(0.01));
    CHECK(s.sensors.sensors[4].schedule.empty());
    CHECK(s.horizon == 5);
    CHECK(s.prune.mode == PruneMode::Exact);
}

TEST_CASE("malformed configs are rejected with a scenario error") {
    nlohmann::json base = {
        {"system", {{"A_f", {{0.7}}}, {"B_f", {{0.4}}}, {"B_wf", {{-0.7}}}}},
        {"weights", {{"L", {{5.0}}}, {"H", {{3.0}}}}},
        {"sensors", {{{"C", {{1.0}}}}}},
        {"horizon", 5},
        {"x0_true", {1.0}},
        {"x0_assumed", {1.0}},
    };

    nlohmann::json bad_L = base;
    bad_L["weights"]["L"] = {{-5.0}};
    CHECK_THROWS_AS(parse_scenario(bad_L), ScenarioError);

    nlohmann::json bad_horizon = base;
    bad_horizon["horizon"] = 0;
    CHECK_THROWS_AS(parse_scenario(bad_horizon), ScenarioError);

    nlohmann::json missing = base;
    missing.erase("system");
    CHECK_THROWS_AS(parse_scenario(missing), ScenarioError);

    nlohmann::json bad_dim = base;
    bad_dim["x0_true"] = {1.0, 2.0};
    CHECK_THROWS_AS(parse_scenario(bad_dim), ScenarioError);

    nlohmann::json bad_sched = base;
    bad_sched["sensors"][0]["schedule"] = {{{"from_step", 2}, {"C", {{0.1}}}},
                                           {{"from_step", 1}, {"C", {{0.2}}}}};
    CHECK_THROWS_AS(parse_scenario(bad_sched), ScenarioError);

    CHECK_NOTHROW(parse_scenario(base));
}

TEST_CASE("observability warnings flag unobservable pairs") {
    SensorSuite suite;
    Eigen::MatrixXd C(1, 2);
    C << 1.0, 0.0;
    suite.sensors.push_back(SensorModel{C, {}, 0.0});
    suite.H = Eigen::MatrixXd::Identity(1, 1);

    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);  // (A, [1 0]) unobservable
    CHECK(observability_warnings(A, suite).size() == 1);

    Eigen::MatrixXd A2(2, 2);
    A2 << 0.9, 0.2, 0.1, 0.8;
    CHECK(observability_warnings(A2, suite).empty());
}

TEST_CASE("trace csv round-trips the report values exactly") {
    ScenarioConfig s = load_scenario(std::string(MINPLUS_SCENARIO_DIR) + "/fig2.json");
    MeasurementTrace trace = simulate(s);
    Filter f(s.system, s.sensors, s.L, s.x0_assumed, s.prune);
    auto reports = f.run(trace.frames);

    std::stringstream csv;
    write_trace_csv(csv, s, trace, reports);
    TraceCsv parsed = read_trace_csv(csv);
    REQUIRE(parsed.rows.size() == reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        CHECK(parsed.at(i, "k") == reports[i].k);
        CHECK(parsed.at(i, "x_est") == reports[i].x_est(0));          // exact
        CHECK(parsed.at(i, "v_min") == reports[i].v_min);             // exact
        CHECK(parsed.at(i, "active_sensor") == reports[i].active_sensor);
        CHECK(parsed.at(i, "terms_pre") == reports[i].term_count_pre_prune);
        CHECK(parsed.at(i, "x_true") ==
              trace.x_true[static_cast<std::size_t>(reports[i].k)](0));
        CHECK(parsed.at(i, "y_5") == trace.frames[i].y[4](0));
    }
}

TEST_CASE("report json carries the scenario echo and per-step reports") {
    ScenarioConfig s = load_scenario(std::string(MINPLUS_SCENARIO_DIR) + "/fig1.json");
    MeasurementTrace trace = simulate(s);
    Filter f(s.system, s.sensors, s.L, s.x0_assumed, s.prune);
    auto reports = f.run(trace.frames);
    nlohmann::json j = report_to_json(s, trace, reports);
    CHECK(j["scenario"]["horizon"] == 5);
    CHECK(j["steps"].size() == 5);
    CHECK(j["steps"][0]["k"] == 1);
    CHECK(j.contains("terminal_error"));
}
