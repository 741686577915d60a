#include <random>

#include <catch_amalgamated.hpp>

#include "minplus/filter.hpp"
#include "minplus/simulator.hpp"

using namespace minplus;
using Catch::Approx;

namespace {

Eigen::MatrixXd m1(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }
Eigen::VectorXd v1(double v) { return Eigen::VectorXd::Constant(1, v); }

ScenarioConfig failure_scenario() {
    ScenarioConfig s;
    s.system = ForwardSystem{m1(0.7), m1(0.4), m1(-0.7)};
    s.L = m1(5.0);
    s.sensors.H = m1(3.0);
    for (double c : {1.5, -2.0, 1.7, 3.5, 1.0}) {
        s.sensors.sensors.push_back(SensorModel{m1(c), {}, 0.0});
        s.sensors.H_per_sensor.push_back(std::nullopt);
    }
    s.horizon = 5;
    s.x0_true = v1(1.0);
    s.x0_assumed = v1(1.0);
    return s;
}

}  // namespace

TEST_CASE("filter starts from the prior value function") {
    ScenarioConfig s = failure_scenario();
    Filter f(s.system, s.sensors, s.L, v1(0.0));
    REQUIRE(f.value_function().size() == 1);
    CHECK(f.value_function().terms()[0].q.a()(0, 0) == Approx(5.0));
    CHECK(f.value_function().terms()[0].q.c() == Approx(0.0).margin(1e-15));
    CHECK(f.k() == 0);

    Filter fi(s.system, s.sensors, Eigen::MatrixXd::Identity(1, 1), v1(0.0));
    CHECK(evaluate_min(fi.value_function(), 2.0) == Approx(4.0));
}

TEST_CASE("single-sensor filter converges on exact measurements") {
    ScenarioConfig s = failure_scenario();
    s.sensors.sensors.resize(1);
    s.sensors.H_per_sensor.resize(1);
    s.sensors.sensors[0].C_nominal = m1(1.5);
    s.horizon = 12;
    s.x0_true = v1(2.0);
    s.x0_assumed = v1(0.5);  // deliberate initial error

    MeasurementTrace trace = simulate(s, 0);
    Filter f(s.system, s.sensors, s.L, s.x0_assumed);
    auto reports = f.run(trace.frames);
    REQUIRE(reports.size() == 12);
    double prev_err = 1e100;
    for (std::size_t k = 1; k < reports.size(); ++k) {
        const double err =
            (reports[k].x_est - trace.x_true[k + 1]).norm();
        CHECK(err < prev_err + 1e-12);
        prev_err = err;
    }
    CHECK(prev_err < 1e-3);
}

TEST_CASE("zero measurement weight leaves the propagated prior") {
    ScenarioConfig s = failure_scenario();
    s.sensors.H = m1(0.0);
    s.x0_assumed = v1(1.0);
    MeasurementTrace trace = simulate(s, 0);
    Filter f(s.system, s.sensors, s.L, s.x0_assumed);
    auto reports = f.run(trace.frames);
    // Prior vertex propagates by the forward dynamics each step (u = 0).
    double expected = 1.0;
    for (const EstimateReport& r : reports) {
        expected *= 0.7;
        CHECK(r.x_est(0) == Approx(expected).margin(1e-9));
    }
}

TEST_CASE("out-of-order frames are rejected") {
    ScenarioConfig s = failure_scenario();
    MeasurementTrace trace = simulate(s, 0);
    Filter f(s.system, s.sensors, s.L, s.x0_assumed);
    MeasurementFrame bad = trace.frames[1];  // k = 2 while filter expects 1
    CHECK_THROWS_AS(f.step(bad), std::logic_error);
}

TEST_CASE("runs are deterministic") {
    ScenarioConfig s = failure_scenario();
    for (auto& sensor : s.sensors.sensors) sensor.noise_sigma = 0.05;
    s.w_sigma = 0.1;
    MeasurementTrace trace = simulate(s, 42);

    auto run_once = [&]() {
        Filter f(s.system, s.sensors, s.L, s.x0_assumed, {PruneMode::Exact, 0});
        return f.run(trace.frames);
    };
    auto a = run_once();
    auto b = run_once();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x_est(0) == b[i].x_est(0));  // bit-identical
        CHECK(a[i].v_min == b[i].v_min);
        CHECK(a[i].active_sensor == b[i].active_sensor);
    }
}

TEST_CASE("exact pruning is transparent at the filter level") {
    ScenarioConfig s = failure_scenario();
    // Failure configuration: the optimal term is well separated, so pruning
    // cannot perturb the argmin.
    const double failed[4] = {0.01, 0.1, 0.2, 0.01};
    for (int j = 0; j < 4; ++j)
        s.sensors.sensors[static_cast<std::size_t>(j)].schedule.emplace_back(1, m1(failed[j]));
    for (auto& sensor : s.sensors.sensors) sensor.noise_sigma = 0.02;
    s.w_sigma = 0.1;
    MeasurementTrace trace = simulate(s, 3);

    Filter pruned(s.system, s.sensors, s.L, s.x0_assumed, {PruneMode::Exact, 0});
    Filter unpruned(s.system, s.sensors, s.L, s.x0_assumed, {PruneMode::Off, 0});
    auto rp = pruned.run(trace.frames);
    auto ru = unpruned.run(trace.frames);
    REQUIRE(rp.size() == ru.size());
    for (std::size_t i = 0; i < rp.size(); ++i) {
        CHECK((rp[i].x_est - ru[i].x_est).norm() <= 1e-9);
        CHECK(rp[i].active_sensor == ru[i].active_sensor);
        CHECK(rp[i].term_count_post_prune <= ru[i].term_count_post_prune);
    }
}

TEST_CASE("reported cost is never meaningfully negative") {
    ScenarioConfig s = failure_scenario();
    for (auto& sensor : s.sensors.sensors) sensor.noise_sigma = 0.1;
    s.w_sigma = 0.2;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        MeasurementTrace trace = simulate(s, seed);
        Filter f(s.system, s.sensors, s.L, s.x0_assumed, {PruneMode::Exact, 0});
        for (const EstimateReport& r : f.run(trace.frames)) CHECK(r.v_min >= -1e-9);
    }
}

TEST_CASE("empty trace yields no reports") {
    ScenarioConfig s = failure_scenario();
    Filter f(s.system, s.sensors, s.L, s.x0_assumed);
    CHECK(f.run({}).empty());
}
