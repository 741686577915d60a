// Independent brute-force references used to certify the analytic
// propagation: dense numeric minimization over the disturbance, a grid
// dynamic-programming tabulation, and a batch normal-equations estimator.
// None of these routines are performance-oriented.
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "minplus/filter.hpp"
#include "minplus/propagation.hpp"
#include "minplus/scenario.hpp"
#include "minplus/simulator.hpp"

namespace minplus::oracle {

struct GridOptions {
    double initial_halfwidth = 0.0;  // 0 = choose from problem scale
    int points_per_dim = 7;
    double tol = 1e-8;
    int max_refinements = 200;
};

namespace detail {

// Enumerates offsets in {-h, ..., h}^n around a center, recentering and
// shrinking until successive best values agree. The objective per quadratic
// term is convex in w, so local refinement is sound.
template <typename F>
double refine_min(F&& f, Eigen::Index n, double halfwidth, const GridOptions& opts) {
    Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
    const int p = opts.points_per_dim;
    double h = halfwidth;
    double prev_best = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_refinements; ++iter) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::VectorXd best_w = center;
        bool best_on_edge = false;
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        Eigen::VectorXd w(n);
        while (true) {
            for (Eigen::Index d = 0; d < n; ++d)
                w(d) = center(d) + h * (2.0 * idx[static_cast<std::size_t>(d)] / (p - 1) - 1.0);
            const double v = f(w);
            if (v < best) {
                best = v;
                best_w = w;
                best_on_edge = false;
                for (Eigen::Index d = 0; d < n; ++d) {
                    const int id = idx[static_cast<std::size_t>(d)];
                    if (id == 0 || id == p - 1) best_on_edge = true;
                }
            }
            Eigen::Index d = 0;
            for (; d < n; ++d) {
                if (++idx[static_cast<std::size_t>(d)] < p) break;
                idx[static_cast<std::size_t>(d)] = 0;
            }
            if (d == n) break;
        }
        center = best_w;
        if (best_on_edge) {
            // Minimizer may sit outside the bracket; chase it before shrinking.
            h *= 2.0;
            prev_best = best;
            continue;
        }
        const double cell = 2.0 * h / (p - 1);
        h = 1.5 * cell;  // next grid spans the neighbor cells of the best point
        // Converged only once the bracket itself is fine enough; equality of
        // successive bests alone can be a stall with the center still best.
        const bool cell_fine = cell <= 1e-6 * (1.0 + halfwidth);
        if (cell_fine &&
            std::abs(best - prev_best) <= opts.tol * std::max(1.0, std::abs(best)))
            return best;
        prev_best = best;
    }
    throw std::runtime_error("refine_min: no convergence after max refinements");
}

}  // namespace detail

// min over w of q(A_r x + B_r u + w) + w'Ww by iterative grid refinement.
inline double numeric_min_over_w(const QuadraticForm& q, const ReversedSystem& sys,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& x,
                                 const GridOptions& opts = {}) {
    const Eigen::VectorXd z = sys.A_r * x + sys.B_r * u;
    double halfwidth = opts.initial_halfwidth;
    if (halfwidth <= 0.0)
        halfwidth = 4.0 * (1.0 + z.norm() + q.b().norm());
    return detail::refine_min(
        [&](const Eigen::VectorXd& w) {
            return evaluate(q, (z + w).eval()) + w.dot(sys.W * w);
        },
        q.dim(), halfwidth, opts);
}

inline double numeric_min_over_w(const QuadraticForm& q, const ReversedSystem& sys,
                                 double u, double x, const GridOptions& opts = {}) {
    return numeric_min_over_w(q, sys, Eigen::VectorXd::Constant(1, u),
                              Eigen::VectorXd::Constant(1, x), opts);
}

// Brute-force value of one dp step at a point: min over sensors and terms of
// the numerically minimized propagation plus the residual. Independent of
// eliminate_disturbance / dp_step.
inline double brute_force_dp_value(const MinPlusValueFunction& V,
                                   const MeasurementFrame& frame,
                                   const ReversedSystem& sys,
                                   const SensorSuite& sensors,
                                   const Eigen::VectorXd& x,
                                   const GridOptions& opts = {}) {
    double best = std::numeric_limits<double>::infinity();
    for (const Term& t : V.terms()) {
        const double propagated = numeric_min_over_w(t.q, sys, frame.u, x, opts);
        for (std::size_t j = 0; j < sensors.count(); ++j) {
            const Eigen::VectorXd r = frame.y[j] - sensors.sensors[j].C_nominal * x;
            best = std::min(best, propagated + r.dot(sensors.weight(j) * r));
        }
    }
    return best;
}

struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int points = 0;

    double spacing() const { return (hi - lo) / (points - 1); }
    double node(int i) const { return lo + i * spacing(); }
};

struct GridValueTable {
    std::vector<GridAxis> axes;                  // one per state dimension
    std::vector<std::vector<double>> values;     // [k][flat node index], k = 0..N
    double interpolation_error_bound = 0.0;      // h^2 * max curvature scale

    double value_at(int k, const Eigen::VectorXd& x) const;
};

namespace detail {

inline double interp(const std::vector<GridAxis>& axes, const std::vector<double>& table,
                     const Eigen::VectorXd& x, bool& in_range) {
    const std::size_t n = axes.size();
    std::vector<int> base(n);
    std::vector<double> frac(n);
    in_range = true;
    for (std::size_t d = 0; d < n; ++d) {
        const double t = (x(static_cast<Eigen::Index>(d)) - axes[d].lo) / axes[d].spacing();
        if (t < 0.0 || t > axes[d].points - 1) { in_range = false; return 0.0; }
        int b = static_cast<int>(std::floor(t));
        if (b >= axes[d].points - 1) b = axes[d].points - 2;
        base[d] = b;
        frac[d] = t - b;
    }
    // Multilinear over the 2^n cell corners.
    double acc = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
        double weight = 1.0;
        std::size_t flat = 0, stride = 1;
        for (std::size_t d = 0; d < n; ++d) {
            const bool hi = (corner >> d) & 1;
            weight *= hi ? frac[d] : 1.0 - frac[d];
            flat += stride * static_cast<std::size_t>(base[d] + (hi ? 1 : 0));
            stride *= static_cast<std::size_t>(axes[d].points);
        }
        acc += weight * table[flat];
    }
    return acc;
}

}  // namespace detail

inline double GridValueTable::value_at(int k, const Eigen::VectorXd& x) const {
    bool in_range = false;
    const double v = detail::interp(axes, values.at(static_cast<std::size_t>(k)), x, in_range);
    if (!in_range) throw std::runtime_error("GridValueTable::value_at: point outside grid");
    return v;
}

// Tabulates the dp recursion by exhaustive minimization over a disturbance
// grid and the sensor index at every state node. State dimension 1 or 2 only.
inline GridValueTable grid_value_function(const ScenarioConfig& scenario,
                                          const MeasurementTrace& trace,
                                          const GridAxis& x_axis, const GridAxis& w_axis) {
    const Eigen::Index n = scenario.state_dim();
    if (n > 2) throw std::invalid_argument("grid_value_function: state dimension must be 1 or 2");
    const ReversedSystem sys = reverse_dynamics(scenario.system);

    GridValueTable table;
    table.axes.assign(static_cast<std::size_t>(n), x_axis);
    std::size_t node_count = 1;
    for (const GridAxis& ax : table.axes) node_count *= static_cast<std::size_t>(ax.points);

    auto node_state = [&](std::size_t flat) {
        Eigen::VectorXd x(n);
        for (Eigen::Index d = 0; d < n; ++d) {
            x(d) = table.axes[static_cast<std::size_t>(d)].node(
                static_cast<int>(flat % static_cast<std::size_t>(x_axis.points)));
            flat /= static_cast<std::size_t>(x_axis.points);
        }
        return x;
    };

    std::vector<double> v0(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
        const Eigen::VectorXd d = node_state(i) - scenario.x0_assumed;
        v0[i] = d.dot(scenario.L * d);
    }
    table.values.push_back(std::move(v0));

    std::size_t w_count = 1;
    for (Eigen::Index d = 0; d < n; ++d) w_count *= static_cast<std::size_t>(w_axis.points);
    auto w_at = [&](std::size_t flat) {
        Eigen::VectorXd w(n);
        for (Eigen::Index d = 0; d < n; ++d) {
            w(d) = w_axis.node(static_cast<int>(flat % static_cast<std::size_t>(w_axis.points)));
            flat /= static_cast<std::size_t>(w_axis.points);
        }
        return w;
    };

    for (int k = 1; k <= scenario.horizon; ++k) {
        const MeasurementFrame& frame = trace.frames.at(static_cast<std::size_t>(k - 1));
        const std::vector<double>& prev = table.values.back();
        std::vector<double> cur(node_count);
        bool any_interior_min = false;
        for (std::size_t i = 0; i < node_count; ++i) {
            const Eigen::VectorXd x = node_state(i);
            const Eigen::VectorXd z = sys.A_r * x + sys.B_r * frame.u;
            double best_prop = std::numeric_limits<double>::infinity();
            std::size_t best_wi = 0;
            for (std::size_t wi = 0; wi < w_count; ++wi) {
                const Eigen::VectorXd w = w_at(wi);
                bool in_range = false;
                const double pv = detail::interp(table.axes, prev, z + w, in_range);
                if (!in_range) continue;
                const double v = pv + w.dot(sys.W * w);
                if (v < best_prop) {
                    best_prop = v;
                    best_wi = wi;
                }
            }
            bool best_on_boundary = false;
            for (Eigen::Index d = 0, f = static_cast<Eigen::Index>(best_wi); d < n; ++d) {
                const int id = static_cast<int>(f % w_axis.points);
                f /= w_axis.points;
                if (id == 0 || id == w_axis.points - 1) best_on_boundary = true;
            }
            if (!std::isfinite(best_prop))
                throw std::runtime_error("grid_value_function: prior state leaves the x range; widen it");
            if (!best_on_boundary) any_interior_min = true;
            // Parabolic refinement of the scanned minimum (1-D only): the scan
            // error is quadratic in the w spacing and dominates otherwise.
            if (n == 1 && !best_on_boundary) {
                const double h = w_axis.spacing();
                auto f = [&](double wv) {
                    bool ok = false;
                    const double pv =
                        detail::interp(table.axes, prev, z + Eigen::VectorXd::Constant(1, wv), ok);
                    return ok ? pv + wv * sys.W(0, 0) * wv
                              : std::numeric_limits<double>::infinity();
                };
                const double w0 = w_at(best_wi)(0);
                const double vm = f(w0 - h), vp = f(w0 + h);
                const double curv = vm - 2.0 * best_prop + vp;
                if (std::isfinite(vm) && std::isfinite(vp) && curv > 0.0) {
                    const double drop = (vm - vp) * (vm - vp) / (8.0 * curv);
                    if (drop < curv) best_prop -= drop;  // stay within the bracket
                }
            }
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < scenario.sensors.count(); ++j) {
                const Eigen::VectorXd r =
                    frame.y[j] - scenario.sensors.sensors[j].C_nominal * x;
                best = std::min(best, best_prop + r.dot(scenario.sensors.weight(j) * r));
            }
            cur[i] = best;
        }
        if (!any_interior_min)
            throw std::runtime_error("grid_value_function: optimal disturbance pinned to the w range boundary; widen it");
        table.values.push_back(std::move(cur));
    }

    const double h = x_axis.spacing();
    table.interpolation_error_bound = h * h;
    return table;
}

// Deterministic minimum-energy estimate for a single-sensor scenario by
// direct minimization of the batch cost over the whole trajectory via normal
// equations. Estimates for every growing horizon 1..N.
inline std::vector<Eigen::VectorXd> rls_reference(const ScenarioConfig& scenario,
                                                  const MeasurementTrace& trace) {
    if (scenario.sensors.count() != 1)
        throw std::invalid_argument("rls_reference: exactly one sensor required");
    const Eigen::Index n = scenario.state_dim();
    const Eigen::MatrixXd& A = scenario.system.A_f;
    const Eigen::MatrixXd D =
        Eigen::PartialPivLU<Eigen::MatrixXd>(scenario.system.B_wf)
            .solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd S = D.transpose() * D;  // |w|^2 in trajectory increments
    const Eigen::MatrixXd& C = scenario.sensors.sensors[0].C_nominal;
    const Eigen::MatrixXd& H = scenario.sensors.weight(0);

    std::vector<Eigen::VectorXd> estimates;
    for (int N = 1; N <= scenario.horizon; ++N) {
        const Eigen::Index dim = n * (N + 1);
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);

        G.topLeftCorner(n, n) += scenario.L;
        g.head(n) += scenario.L * scenario.x0_assumed;

        for (int i = 0; i < N; ++i) {
            const Eigen::VectorXd d = scenario.system.B_f * scenario.input_at(i);
            const Eigen::Index bi = n * i, bn = n * (i + 1);
            G.block(bn, bn, n, n) += S;
            G.block(bn, bi, n, n) -= S * A;
            G.block(bi, bn, n, n) -= A.transpose() * S;
            G.block(bi, bi, n, n) += A.transpose() * S * A;
            g.segment(bn, n) += S * d;
            g.segment(bi, n) -= A.transpose() * S * d;
        }
        for (int i = 1; i <= N; ++i) {
            const Eigen::VectorXd& y = trace.frames.at(static_cast<std::size_t>(i - 1)).y[0];
            G.block(n * i, n * i, n, n) += C.transpose() * H * C;
            g.segment(n * i, n) += C.transpose() * H * y;
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("rls_reference: singular normal equations");
        const Eigen::VectorXd z = ldlt.solve(g);
        estimates.push_back(z.tail(n));
    }
    return estimates;
}

}  // namespace minplus::oracle
