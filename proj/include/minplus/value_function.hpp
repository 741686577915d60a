// Min-plus expansion V_k(x) = min over terms of quadratic(x), with sensor
// lineage tags, pruning, and global argmin extraction.
#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "minplus/quadratic_form.hpp"

namespace minplus {

// Cross-product coordinate in the index set: one sensor index (1-based) per
// elapsed dp step.
struct TermTag {
    std::vector<int> lineage;
};

// Last sensor chosen along a term's history; nullopt at k = 0.
inline std::optional<int> active_sensor_of(const TermTag& tag) {
    if (tag.lineage.empty()) return std::nullopt;
    return tag.lineage.back();
}

struct Term {
    QuadraticForm q;
    TermTag tag;
};

class MinPlusValueFunction {
public:
    MinPlusValueFunction(std::vector<Term> terms, int k)
        : terms_(std::move(terms)), k_(k) {
        if (terms_.empty())
            throw std::invalid_argument("MinPlusValueFunction: empty term set");
        n_ = terms_.front().q.dim();
        for (const Term& t : terms_)
            if (t.q.dim() != n_)
                throw std::invalid_argument("MinPlusValueFunction: mixed dimensions");
    }

    const std::vector<Term>& terms() const { return terms_; }
    int k() const { return k_; }
    Eigen::Index dim() const { return n_; }
    std::size_t size() const { return terms_.size(); }

private:
    std::vector<Term> terms_;
    int k_;
    Eigen::Index n_;
};

// V_0(x) = |x - x0|^2_L, a single term with empty lineage.
inline MinPlusValueFunction init_value(const Eigen::MatrixXd& L,
                                       const Eigen::VectorXd& x0) {
    if (L.rows() != L.cols() || L.rows() != x0.size())
        throw std::invalid_argument("init_value: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
    if ((L - L.transpose()).cwiseAbs().maxCoeff() > kSymTolerance ||
        es.eigenvalues().minCoeff() <= kPdTolerance)
        throw std::invalid_argument("init_value: prior weight L must be symmetric positive definite");
    return MinPlusValueFunction(
        {Term{QuadraticForm(L, -L * x0, x0.dot(L * x0)), TermTag{}}}, 0);
}

inline double evaluate_min(const MinPlusValueFunction& V, const Eigen::VectorXd& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const Term& t : V.terms()) best = std::min(best, evaluate(t.q, x));
    return best;
}

inline double evaluate_min(const MinPlusValueFunction& V, double x) {
    return evaluate_min(V, Eigen::VectorXd::Constant(1, x));
}

// Per-term vertices, deduplicated within kPointTolerance.
inline std::vector<Eigen::VectorXd> candidate_minima(const MinPlusValueFunction& V) {
    std::vector<Eigen::VectorXd> out;
    for (const Term& t : V.terms()) {
        Eigen::VectorXd v = vertex(t.q);
        bool dup = false;
        for (const Eigen::VectorXd& seen : out)
            if ((seen - v).cwiseAbs().maxCoeff() <= kPointTolerance) { dup = true; break; }
        if (!dup) out.push_back(std::move(v));
    }
    return out;
}

struct GlobalArgmin {
    Eigen::VectorXd x;
    double value;
    TermTag tag;
    std::size_t term_index;
};

// The global minimizer of a pointwise min of strictly convex quadratics is the
// vertex of a term active there, so scanning candidate vertices is exact.
// Ties within kDomTolerance break toward the lowest term index.
inline GlobalArgmin global_argmin(const MinPlusValueFunction& V) {
    const std::vector<Eigen::VectorXd> candidates = candidate_minima(V);
    double best_val = std::numeric_limits<double>::infinity();
    const Eigen::VectorXd* best_x = nullptr;
    for (const Eigen::VectorXd& x : candidates) {
        const double v = evaluate_min(V, x);
        if (v < best_val - kDomTolerance || best_x == nullptr) {
            best_val = v;
            best_x = &x;
        }
    }
    // Tag of the lowest-index term achieving the min at best_x.
    std::size_t idx = 0;
    for (std::size_t i = 0; i < V.terms().size(); ++i) {
        if (evaluate(V.terms()[i].q, *best_x) <= best_val + kDomTolerance) {
            idx = i;
            break;
        }
    }
    return GlobalArgmin{*best_x, best_val, V.terms()[idx].tag, idx};
}

enum class PruneMode { Off, Exact, Capped };

struct PruneConfig {
    PruneMode mode = PruneMode::Exact;
    std::size_t cap = 0;  // only used in Capped mode
};

// Exact mode drops every term dominated by another (earliest index survives a
// mutual domination, i.e. duplicates); evaluate_min is unchanged everywhere.
// Capped mode additionally keeps at most `cap` terms ranked by ascending
// min_value; the result over-approximates V from above.
inline MinPlusValueFunction prune(const MinPlusValueFunction& V, const PruneConfig& config) {
    if (config.mode == PruneMode::Off) return V;

    const std::vector<Term>& ts = V.terms();
    std::vector<bool> dead(ts.size(), false);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (dead[i]) continue;
        for (std::size_t j = 0; j < ts.size(); ++j) {
            if (i == j || dead[j]) continue;
            if (dominates(ts[i].q, ts[j].q)) {
                // Mutual domination keeps the earlier index.
                if (j > i || !dominates(ts[j].q, ts[i].q)) dead[j] = true;
            }
        }
    }
    std::vector<Term> kept;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (!dead[i]) kept.push_back(ts[i]);

    if (config.mode == PruneMode::Capped && config.cap > 0 && kept.size() > config.cap) {
        std::vector<std::size_t> order(kept.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return min_value(kept[a].q) < min_value(kept[b].q);
        });
        order.resize(config.cap);
        std::sort(order.begin(), order.end());
        std::vector<Term> capped;
        for (std::size_t i : order) capped.push_back(kept[i]);
        kept = std::move(capped);
    }
    return MinPlusValueFunction(std::move(kept), V.k());
}

}  // namespace minplus
