// Forward simulation model, its time-reversed counterpart, and sensor suites
// with failure schedules.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "minplus/quadratic_form.hpp"

namespace minplus {

// x_{k+1} = A_f x_k + B_f u_k + B_wf w_k
struct ForwardSystem {
    Eigen::MatrixXd A_f;
    Eigen::MatrixXd B_f;
    Eigen::MatrixXd B_wf;

    Eigen::Index state_dim() const { return A_f.rows(); }
    Eigen::Index input_dim() const { return B_f.cols(); }
};

// x_k = A_r x_{k+1} + B_r u_k + v, disturbance energy v'Wv.
struct ReversedSystem {
    Eigen::MatrixXd A_r;
    Eigen::MatrixXd B_r;
    Eigen::MatrixXd W;

    Eigen::Index state_dim() const { return A_r.rows(); }
};

// Inverts the forward model. The reversed disturbance gain G_r = -A_f^{-1}B_wf
// is absorbed into the weight W = (G_r^{-1})' G_r^{-1} so the penalty v'Wv
// equals the forward |w|^2; W = I exactly when G_r = I.
inline ReversedSystem reverse_dynamics(const ForwardSystem& fwd) {
    const Eigen::Index n = fwd.state_dim();
    if (fwd.A_f.rows() != fwd.A_f.cols() || fwd.B_wf.rows() != n || fwd.B_f.rows() != n)
        throw std::invalid_argument("reverse_dynamics: inconsistent dimensions");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fwd.A_f);
    if (svd.singularValues().minCoeff() <= 1e-12)
        throw std::invalid_argument("reverse_dynamics: dynamics matrix A_f is singular");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(fwd.A_f);
    ReversedSystem rev;
    rev.A_r = lu.solve(Eigen::MatrixXd::Identity(n, n));
    rev.B_r = -lu.solve(fwd.B_f);
    const Eigen::MatrixXd G_r = -lu.solve(fwd.B_wf);
    if ((G_r - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-9) {
        rev.W = Eigen::MatrixXd::Identity(n, n);
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> gsvd(G_r);
        if (gsvd.singularValues().minCoeff() <= 1e-12)
            throw std::invalid_argument("reverse_dynamics: degenerate disturbance gain B_wf");
        Eigen::MatrixXd G_inv = Eigen::PartialPivLU<Eigen::MatrixXd>(G_r).solve(
            Eigen::MatrixXd::Identity(n, n));
        rev.W = G_inv.transpose() * G_inv;
        rev.W = 0.5 * (rev.W + rev.W.transpose()).eval();
    }
    return rev;
}

// One sensor: nominal output map, optional failure schedule (step-indexed C
// overrides), and measurement noise scale for the simulator.
struct SensorModel {
    Eigen::MatrixXd C_nominal;
    std::vector<std::pair<int, Eigen::MatrixXd>> schedule;  // (from_step, C) ascending
    double noise_sigma = 0.0;

    // Effective map at step k: last override with from_step <= k, else nominal.
    const Eigen::MatrixXd& effective_C(int k) const {
        const Eigen::MatrixXd* c = &C_nominal;
        for (const auto& [from, C_over] : schedule) {
            if (from <= k) c = &C_over;
            else break;
        }
        return *c;
    }
};

struct SensorSuite {
    std::vector<SensorModel> sensors;
    Eigen::MatrixXd H;                                 // shared measurement weight
    std::vector<std::optional<Eigen::MatrixXd>> H_per_sensor;  // optional overrides

    std::size_t count() const { return sensors.size(); }

    const Eigen::MatrixXd& weight(std::size_t j) const {
        if (j < H_per_sensor.size() && H_per_sensor[j]) return *H_per_sensor[j];
        return H;
    }
};

// Rank check of [C; CA; ...; CA^{n-1}] per sensor against the nominal maps.
// Returns a warning line per unobservable pair; never throws (failure
// scenarios deliberately violate observability mid-run).
inline std::vector<std::string> observability_warnings(const Eigen::MatrixXd& A,
                                                       const SensorSuite& suite) {
    std::vector<std::string> out;
    const Eigen::Index n = A.rows();
    for (std::size_t j = 0; j < suite.count(); ++j) {
        const Eigen::MatrixXd& C = suite.sensors[j].C_nominal;
        Eigen::MatrixXd obs(C.rows() * n, n);
        Eigen::MatrixXd CAk = C;
        for (Eigen::Index i = 0; i < n; ++i) {
            obs.middleRows(i * C.rows(), C.rows()) = CAk;
            CAk = (CAk * A).eval();
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(obs);
        if (lu.rank() < n)
            out.push_back("sensor " + std::to_string(j + 1) +
                          ": pair (A, C) is not observable");
    }
    return out;
}

// Measurements y^j at time k plus the input u that drove the k-1 -> k
// transition.
struct MeasurementFrame {
    int k = 0;
    std::vector<Eigen::VectorXd> y;
    Eigen::VectorXd u;
};

}  // namespace minplus
