// Forward-time truth model with seeded disturbance/measurement noise and
// time-varying sensor maps.
#pragma once

#include <random>
#include <vector>

#include "minplus/scenario.hpp"
#include "minplus/system.hpp"

namespace minplus {

struct MeasurementTrace {
    std::vector<MeasurementFrame> frames;        // steps 1..N
    std::vector<Eigen::VectorXd> x_true;         // states 0..N
    std::vector<Eigen::VectorXd> w;              // realized disturbances 0..N-1
    std::vector<std::vector<Eigen::VectorXd>> eta;  // [step 1..N][sensor]
};

namespace detail {

class NoiseGenerator {
public:
    NoiseGenerator(std::uint64_t seed, NoiseModel model) : rng_(seed), model_(model) {}

    // Uniform on [-sigma, sigma], or a truncated bell (mean of three uniforms,
    // rescaled to the same support).
    double draw(double sigma) {
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        double v;
        if (model_ == NoiseModel::Uniform) {
            v = dist(rng_);
        } else {
            v = (dist(rng_) + dist(rng_) + dist(rng_)) / 3.0;
        }
        return sigma * v;
    }

    Eigen::VectorXd draw_vector(Eigen::Index n, double sigma) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = draw(sigma);
        return v;
    }

private:
    std::mt19937_64 rng_;
    NoiseModel model_;
};

}  // namespace detail

// x_true(k+1) = A_f x + B_f u + B_wf w; y^j_k = C^j(k) x_true(k) + eta^j_k.
// Same (scenario, seed) yields a bit-identical trace.
inline MeasurementTrace simulate(const ScenarioConfig& scenario, std::uint64_t seed) {
    validate(scenario);
    const Eigen::Index n = scenario.state_dim();
    const int N = scenario.horizon;
    detail::NoiseGenerator gen(seed, scenario.noise_model);

    MeasurementTrace trace;
    trace.x_true.push_back(scenario.x0_true);
    for (int k = 0; k < N; ++k) {
        Eigen::VectorXd wk = scenario.explicit_w
                                 ? (*scenario.explicit_w)[static_cast<std::size_t>(k)]
                                 : gen.draw_vector(n, scenario.w_sigma);
        trace.x_true.push_back(scenario.system.A_f * trace.x_true.back() +
                               scenario.system.B_f * scenario.input_at(k) +
                               scenario.system.B_wf * wk);
        trace.w.push_back(std::move(wk));
    }

    for (int k = 1; k <= N; ++k) {
        MeasurementFrame frame;
        frame.k = k;
        frame.u = scenario.input_at(k - 1);
        std::vector<Eigen::VectorXd> etas_k;
        for (std::size_t j = 0; j < scenario.sensors.count(); ++j) {
            const SensorModel& sm = scenario.sensors.sensors[j];
            const Eigen::MatrixXd& C = sm.effective_C(k);
            Eigen::VectorXd eta =
                scenario.explicit_eta
                    ? (*scenario.explicit_eta)[j][static_cast<std::size_t>(k - 1)]
                    : gen.draw_vector(C.rows(), sm.noise_sigma);
            frame.y.push_back(C * trace.x_true[static_cast<std::size_t>(k)] + eta);
            etas_k.push_back(std::move(eta));
        }
        trace.eta.push_back(std::move(etas_k));
        trace.frames.push_back(std::move(frame));
    }
    return trace;
}

inline MeasurementTrace simulate(const ScenarioConfig& scenario) {
    return simulate(scenario, scenario.seed);
}

}  // namespace minplus
