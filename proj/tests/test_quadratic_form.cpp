#include <random>

#include <catch_amalgamated.hpp>

#include "minplus/quadratic_form.hpp"

using namespace minplus;
using Catch::Approx;

namespace {

Eigen::MatrixXd random_psd(std::mt19937_64& rng, Eigen::Index n, bool strict = false) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = g(rng);
    Eigen::MatrixXd out = m.transpose() * m;
    if (strict) out += 0.1 * Eigen::MatrixXd::Identity(n, n);
    return out;
}

Eigen::VectorXd random_vec(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
    return v;
}

}  // namespace

TEST_CASE("evaluate matches x'ax + 2b'x + c") {
    CHECK(evaluate(QuadraticForm(1, 0, 0), 2.0) == Approx(4.0));
    CHECK(evaluate(QuadraticForm(5, 0, 0), 1.0) == Approx(5.0));
    CHECK(evaluate(QuadraticForm(1, -1, 1), 1.0) == Approx(0.0).margin(1e-15));

    CHECK_THROWS_AS(evaluate(QuadraticForm(1, 0, 0), Eigen::VectorXd::Zero(2)),
                    std::invalid_argument);
}

TEST_CASE("vertex of strictly convex forms") {
    CHECK(vertex(QuadraticForm(1, -1, 1))(0) == Approx(1.0));
    CHECK(vertex(QuadraticForm(2, -2, 0))(0) == Approx(1.0));

    QuadraticForm centered(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 7.0);
    CHECK(vertex(centered).norm() == Approx(0.0).margin(1e-15));

    CHECK_THROWS_AS(vertex(QuadraticForm(0, 1, 0)), NotStrictlyConvex);
    try {
        vertex(QuadraticForm(-2, 0, 0));
        FAIL("expected NotStrictlyConvex");
    } catch (const NotStrictlyConvex& e) {
        CHECK(e.min_eigenvalue() == Approx(-2.0));
    }
}

TEST_CASE("min_value") {
    CHECK(min_value(QuadraticForm(1, -1, 1)) == Approx(0.0).margin(1e-15));
    CHECK(min_value(QuadraticForm(1, -2, 1)) == Approx(-3.0));
    CHECK(min_value(QuadraticForm(5, 0, 0)) == Approx(0.0).margin(1e-15));
}

TEST_CASE("add is componentwise") {
    QuadraticForm s = add(QuadraticForm(1, 0, 0), QuadraticForm(0, 0, 1));
    CHECK(s.a()(0, 0) == Approx(1.0));
    CHECK(s.c() == Approx(1.0));

    QuadraticForm t = add(QuadraticForm(1, -1, 1), QuadraticForm(3, -6, 12));
    CHECK(t.a()(0, 0) == Approx(4.0));
    CHECK(t.b()(0) == Approx(-7.0));
    CHECK(t.c() == Approx(13.0));

    QuadraticForm q(2, -3, 5);
    QuadraticForm same = add(q, QuadraticForm::zero(1));
    CHECK(same.a()(0, 0) == Approx(q.a()(0, 0)));
    CHECK(same.b()(0) == Approx(q.b()(0)));
    CHECK(same.c() == Approx(q.c()));

    CHECK_THROWS_AS(add(q, QuadraticForm::zero(2)), std::invalid_argument);
}

TEST_CASE("add distributes over evaluate") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 1 + trial % 3;
        QuadraticForm q1(random_psd(rng, n), random_vec(rng, n), 0.3);
        QuadraticForm q2(random_psd(rng, n), random_vec(rng, n), -1.2);
        const Eigen::VectorXd x = random_vec(rng, n, 2.0);
        CHECK(evaluate(add(q1, q2), x) ==
              Approx(evaluate(q1, x) + evaluate(q2, x)).epsilon(1e-12));
    }
}

TEST_CASE("vertex attains the minimum") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 1 + trial % 3;
        QuadraticForm q(random_psd(rng, n, true), random_vec(rng, n), 0.7);
        const Eigen::VectorXd v = vertex(q);
        const double mv = min_value(q);
        CHECK(evaluate(q, v) == Approx(mv).margin(1e-10));
        for (int p = 0; p < 100; ++p)
            CHECK(evaluate(q, (v + random_vec(rng, n)).eval()) >= mv - 1e-10);
    }
}

TEST_CASE("residual_quadratic expands the measurement residual") {
    const Eigen::MatrixXd H = Eigen::MatrixXd::Constant(1, 1, 3.0);
    auto C = [](double c) { return Eigen::MatrixXd::Constant(1, 1, c); };
    auto y = [](double v) { return Eigen::VectorXd::Constant(1, v); };

    QuadraticForm r = residual_quadratic(C(1.0), H, y(2.0));
    CHECK(r.a()(0, 0) == Approx(3.0));
    CHECK(r.b()(0) == Approx(-6.0));
    CHECK(r.c() == Approx(12.0));

    QuadraticForm r0 = residual_quadratic(C(1.0), H, y(0.0));
    CHECK(r0.a()(0, 0) == Approx(3.0));
    CHECK(r0.b()(0) == Approx(0.0).margin(1e-15));
    CHECK(r0.c() == Approx(0.0).margin(1e-15));

    CHECK(residual_quadratic(C(1.5), H, y(0.0)).a()(0, 0) == Approx(6.75));

    Eigen::MatrixXd asym(2, 2);
    asym << 1, 0.5, 0.1, 1;
    CHECK_THROWS_AS(residual_quadratic(Eigen::MatrixXd::Identity(2, 2), asym,
                                       Eigen::VectorXd::Zero(2)),
                    std::invalid_argument);
}

TEST_CASE("residual_quadratic matches direct residual at random draws") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + trial % 3, m = 1 + trial % 2;
        std::normal_distribution<double> g(0.0, 1.0);
        Eigen::MatrixXd C(m, n);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j) C(i, j) = g(rng);
        const Eigen::MatrixXd H = random_psd(rng, m);
        const Eigen::VectorXd yv = random_vec(rng, m);
        const Eigen::VectorXd x = random_vec(rng, n, 2.0);
        const Eigen::VectorXd res = yv - C * x;
        const double direct = res.dot(H * res);
        CHECK(evaluate(residual_quadratic(C, H, yv), x) ==
              Approx(direct).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("dominates") {
    QuadraticForm q1(1, 0, 0), q2(2, 0, 1);
    CHECK(dominates(q1, q2));
    CHECK_FALSE(dominates(q2, q1));
    CHECK(dominates(q1, q1));
    CHECK_FALSE(dominates(q1, QuadraticForm(1, 0, -1)));

    // Linear direction not in the range of the difference: unbounded below.
    CHECK_FALSE(dominates(QuadraticForm(1, 0, 0), QuadraticForm(1, 1, 0)));
}

TEST_CASE("dominates implies pointwise ordering") {
    std::mt19937_64 rng(14);
    int positives = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index n = 1 + trial % 3;
        QuadraticForm q1(random_psd(rng, n), random_vec(rng, n), random_vec(rng, 1)(0));
        // Bias toward actual domination half of the time.
        QuadraticForm q2 = (trial % 2 == 0)
                               ? add(q1, QuadraticForm(random_psd(rng, n),
                                                       Eigen::VectorXd::Zero(n), 0.5))
                               : QuadraticForm(random_psd(rng, n), random_vec(rng, n),
                                               random_vec(rng, 1)(0));
        if (!dominates(q1, q2)) continue;
        ++positives;
        for (int s = 0; s < 1000 / 10; ++s) {
            const Eigen::VectorXd x = random_vec(rng, n, 3.0);
            CHECK(evaluate(q1, x) <= evaluate(q2, x) + kDomTolerance);
        }
    }
    CHECK(positives > 50);
}
