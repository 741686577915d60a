// Online estimator: owns the current value function, consumes measurement
// frames in order, and reports the argmin estimate after each step.
#pragma once

#include <vector>

#include "minplus/propagation.hpp"
#include "minplus/system.hpp"
#include "minplus/value_function.hpp"

namespace minplus {

struct EstimateReport {
    int k = 0;
    Eigen::VectorXd x_est;
    double v_min = 0.0;
    int active_sensor = 0;  // 1-based; 0 before any dp step
    std::size_t term_count_pre_prune = 0;
    std::size_t term_count_post_prune = 0;
};

class Filter {
public:
    Filter(const ForwardSystem& fwd, SensorSuite sensors, const Eigen::MatrixXd& L,
           const Eigen::VectorXd& x0_assumed, PruneConfig prune_config = {})
        : sys_(reverse_dynamics(fwd)),
          sensors_(std::move(sensors)),
          prune_config_(prune_config),
          V_(init_value(L, x0_assumed)) {}

    const MinPlusValueFunction& value_function() const { return V_; }
    const ReversedSystem& reversed_system() const { return sys_; }
    int k() const { return V_.k(); }

    // Applies dp_step + prune and extracts the estimate. Frames must arrive
    // strictly in order.
    EstimateReport step(const MeasurementFrame& frame) {
        if (frame.k != V_.k() + 1)
            throw std::logic_error("Filter::step: out-of-order measurement frame (expected k=" +
                                   std::to_string(V_.k() + 1) + ", got " +
                                   std::to_string(frame.k) + ")");
        MinPlusValueFunction propagated = dp_step(V_, frame, sys_, sensors_);
        const std::size_t pre = propagated.size();
        V_ = prune(propagated, prune_config_);

        const GlobalArgmin opt = global_argmin(V_);
        EstimateReport report;
        report.k = V_.k();
        report.x_est = opt.x;
        report.v_min = opt.value;
        report.active_sensor = active_sensor_of(opt.tag).value_or(0);
        report.term_count_pre_prune = pre;
        report.term_count_post_prune = V_.size();
        return report;
    }

    std::vector<EstimateReport> run(const std::vector<MeasurementFrame>& frames) {
        std::vector<EstimateReport> reports;
        reports.reserve(frames.size());
        for (const MeasurementFrame& frame : frames) reports.push_back(step(frame));
        return reports;
    }

private:
    ReversedSystem sys_;
    SensorSuite sensors_;
    PruneConfig prune_config_;
    MinPlusValueFunction V_;
};

}  // namespace minplus
