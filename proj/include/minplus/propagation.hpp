// The one-step dynamic programming operator: analytic disturbance elimination
// per term, per-sensor residual attachment, and the index-set cross product.
#pragma once

#include "minplus/quadratic_form.hpp"
#include "minplus/system.hpp"
#include "minplus/value_function.hpp"

namespace minplus {

// argmin over w of q(z + w) + w'Ww, i.e. w* = -(W + a)^{-1}(az + b).
// With W = I this reduces to w* = (I + a)^{-1}(-b - az).
inline Eigen::VectorXd optimal_disturbance(const QuadraticForm& q,
                                           const Eigen::VectorXd& z,
                                           const Eigen::MatrixXd& W) {
    if (z.size() != q.dim() || W.rows() != q.dim())
        throw std::invalid_argument("optimal_disturbance: dimension mismatch");
    return (W + q.a()).llt().solve(-(q.a() * z + q.b()));
}

// Quadratic in x equal to min over w of q(A_r x + B_r u + w) + w'Ww.
// With N = (W + a)^{-1}:
//   min over w at fixed z is z'(a - aNa)z + 2((I - aN)b)'z + c - b'Nb,
// then z = A_r x + B_r u is substituted.
inline QuadraticForm eliminate_disturbance(const QuadraticForm& q,
                                           const ReversedSystem& sys,
                                           const Eigen::VectorXd& u) {
    const Eigen::Index n = q.dim();
    if (sys.A_r.rows() != n || sys.B_r.rows() != n || u.size() != sys.B_r.cols())
        throw std::invalid_argument("eliminate_disturbance: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(sys.W + q.a());
    const Eigen::MatrixXd Na = llt.solve(q.a());          // N a
    const Eigen::VectorXd Nb = llt.solve(q.b());          // N b
    Eigen::MatrixXd a_tilde = q.a() - q.a() * Na;         // a - aNa
    a_tilde = 0.5 * (a_tilde + a_tilde.transpose()).eval();
    const Eigen::VectorXd b_tilde = q.b() - q.a() * Nb;   // (I - aN) b
    const double c_tilde = q.c() - q.b().dot(Nb);

    const Eigen::VectorXd Bu = sys.B_r * u;
    return QuadraticForm(sys.A_r.transpose() * a_tilde * sys.A_r,
                         sys.A_r.transpose() * (a_tilde * Bu + b_tilde),
                         Bu.dot(a_tilde * Bu) + 2.0 * b_tilde.dot(Bu) + c_tilde);
}

// V_{k+1} term set: { eliminate_disturbance(alpha) + residual(j) } over the
// cross product of current terms and sensors, lineage extended by j. The dp
// operator uses each sensor's nominal map; failures live in the simulator.
// Output order is (parent index, sensor index), so the result is deterministic.
inline MinPlusValueFunction dp_step(const MinPlusValueFunction& V,
                                    const MeasurementFrame& frame,
                                    const ReversedSystem& sys,
                                    const SensorSuite& sensors) {
    const std::size_t M = sensors.count();
    if (frame.y.size() != M)
        throw std::invalid_argument("dp_step: frame has wrong sensor count");

    std::vector<QuadraticForm> residuals;
    residuals.reserve(M);
    for (std::size_t j = 0; j < M; ++j)
        residuals.push_back(residual_quadratic(sensors.sensors[j].C_nominal,
                                               sensors.weight(j), frame.y[j]));

    std::vector<Term> out;
    out.reserve(V.size() * M);
    for (const Term& t : V.terms()) {
        const QuadraticForm propagated = eliminate_disturbance(t.q, sys, frame.u);
        for (std::size_t j = 0; j < M; ++j) {
            TermTag tag = t.tag;
            tag.lineage.push_back(static_cast<int>(j) + 1);
            out.push_back(Term{add(propagated, residuals[j]), std::move(tag)});
        }
    }
    return MinPlusValueFunction(std::move(out), V.k() + 1);
}

}  // namespace minplus
