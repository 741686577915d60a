// Algebra of convex quadratic forms q(x) = x'ax + 2b'x + c.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace minplus {

inline constexpr double kSymTolerance = 1e-12;
inline constexpr double kPdTolerance = 1e-10;
inline constexpr double kDomTolerance = 1e-9;
inline constexpr double kPointTolerance = 1e-8;

// Thrown when an operation needs a strictly convex form but the quadratic
// coefficient is singular or indefinite.
class NotStrictlyConvex : public std::runtime_error {
public:
    explicit NotStrictlyConvex(double min_eigenvalue)
        : std::runtime_error("quadratic coefficient not positive definite (min eigenvalue " +
                             std::to_string(min_eigenvalue) + ")"),
          min_eigenvalue_(min_eigenvalue) {}

    double min_eigenvalue() const { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

// One term of a min-plus expansion. Value convention: x'ax + 2b'x + c.
// `a` is symmetrized on construction; immutable afterwards.
class QuadraticForm {
public:
    QuadraticForm(Eigen::MatrixXd a, Eigen::VectorXd b, double c)
        : a_(std::move(a)), b_(std::move(b)), c_(c) {
        if (a_.rows() != a_.cols())
            throw std::invalid_argument("QuadraticForm: a must be square");
        if (b_.size() != a_.rows())
            throw std::invalid_argument("QuadraticForm: b dimension mismatch");
        if (!a_.allFinite() || !b_.allFinite() || !std::isfinite(c_))
            throw std::invalid_argument("QuadraticForm: non-finite entry");
        a_ = 0.5 * (a_ + a_.transpose()).eval();
    }

    // 1-D convenience.
    QuadraticForm(double a, double b, double c)
        : QuadraticForm(Eigen::MatrixXd::Constant(1, 1, a),
                        Eigen::VectorXd::Constant(1, b), c) {}

    static QuadraticForm zero(Eigen::Index n) {
        return QuadraticForm(Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0);
    }

    const Eigen::MatrixXd& a() const { return a_; }
    const Eigen::VectorXd& b() const { return b_; }
    double c() const { return c_; }
    Eigen::Index dim() const { return a_.rows(); }

    double min_a_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

private:
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    double c_;
};

inline double evaluate(const QuadraticForm& q, const Eigen::VectorXd& x) {
    if (x.size() != q.dim())
        throw std::invalid_argument("evaluate: state dimension mismatch");
    return x.dot(q.a() * x) + 2.0 * q.b().dot(x) + q.c();
}

inline double evaluate(const QuadraticForm& q, double x) {
    return evaluate(q, Eigen::VectorXd::Constant(1, x));
}

// Unique minimizer -a^{-1} b of a strictly convex form, via LLT solve.
inline Eigen::VectorXd vertex(const QuadraticForm& q) {
    const double min_eig = q.min_a_eigenvalue();
    if (min_eig <= kPdTolerance) throw NotStrictlyConvex(min_eig);
    return q.a().llt().solve(-q.b());
}

inline double min_value(const QuadraticForm& q) {
    return evaluate(q, vertex(q));
}

inline QuadraticForm add(const QuadraticForm& q1, const QuadraticForm& q2) {
    if (q1.dim() != q2.dim())
        throw std::invalid_argument("add: dimension mismatch");
    return QuadraticForm(q1.a() + q2.a(), q1.b() + q2.b(), q1.c() + q2.c());
}

// Quadratic of the measurement residual (y - Cx)'H(y - Cx).
inline QuadraticForm residual_quadratic(const Eigen::MatrixXd& C,
                                        const Eigen::MatrixXd& H,
                                        const Eigen::VectorXd& y) {
    if (H.rows() != H.cols() || H.rows() != C.rows() || y.size() != C.rows())
        throw std::invalid_argument("residual_quadratic: dimension mismatch");
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > kSymTolerance)
        throw std::invalid_argument("residual_quadratic: weight H not symmetric");
    return QuadraticForm(C.transpose() * H * C, -C.transpose() * H * y, y.dot(H * y));
}

// True iff q1(x) <= q2(x) for all x. Decided on the difference d = q2 - q1:
// d_a must be PSD, d_b must lie in range(d_a), and the minimum of d over the
// solution set must clear -kDomTolerance.
inline bool dominates(const QuadraticForm& q1, const QuadraticForm& q2) {
    if (q1.dim() != q2.dim())
        throw std::invalid_argument("dominates: dimension mismatch");
    const Eigen::MatrixXd da = q2.a() - q1.a();
    const Eigen::VectorXd db = q2.b() - q1.b();
    const double dc = q2.c() - q1.c();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(da);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    const double rank_tol = scale * 1e-12;
    if (lam.minCoeff() < -rank_tol) return false;

    // Work in the eigenbasis: null directions make d linear, range directions
    // contribute -g_i^2 / lam_i at the optimum.
    const Eigen::VectorXd g = es.eigenvectors().transpose() * db;
    const double b_scale = std::max(1.0, db.norm());
    double min_over_range = dc;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) <= rank_tol) {
            if (std::abs(g(i)) > b_scale * 1e-10) return false;  // unbounded below
        } else {
            min_over_range -= g(i) * g(i) / lam(i);
        }
    }
    return min_over_range >= -kDomTolerance;
}

}  // namespace minplus
