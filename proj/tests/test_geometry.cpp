#include "doctest.h"

#include <cmath>
#include <random>

#include "synthesol/geometry.hpp"

using namespace synthesol;

namespace {

constexpr double kPi = EIGEN_PI;

// Independent oracle: metric entries from finite differences of the chart
// embedding, g_ij = <dE/dq_i, dE/dq_j>.
Eigen::Matrix2d embedded_metric_fd(const ChartPoint& p, double h = 1e-6) {
    Eigen::Matrix<double, 3, 2> t;
    for (int i = 0; i < 2; ++i) {
        ChartPoint pp = p, pm = p;
        pp.q(i) += h;
        pm.q(i) -= h;
        t.col(i) = (sphere_embed(pp) - sphere_embed(pm)) / (2.0 * h);
    }
    return t.transpose() * t;
}

Eigen::Vector2d riemann_apply(const MetricJet& jet, const Eigen::Vector2d& x,
                              const Eigen::Vector2d& y, const Eigen::Vector2d& w) {
    // (R(x, y) w)^l with riemann(l, i, j, k) = R^l_ijk, R(e_j, e_k) e_i = R^l_ijk e_l.
    Eigen::Vector2d out = Eigen::Vector2d::Zero();
    for (int l = 0; l < 2; ++l)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) out(l) += jet.riemann(l, i, j, k) * w(i) * x(j) * y(k);
    return out;
}

} // namespace

TEST_CASE("flat torus metric jets are trivial") {
    const auto m = ManifoldSpec::flat_torus(2);
    Eigen::VectorXd q(2);
    q << 0.3, 1.1;
    const MetricJet jet = metric_jet(m, {q, 0});
    CHECK(jet.g.isIdentity(0.0));
    CHECK(jet.g_inv.isIdentity(0.0));
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                CHECK(jet.christoffel(k, i, j) == 0.0);
                for (int l = 0; l < 2; ++l) CHECK(jet.riemann(l, i, j, k) == 0.0);
            }
}

TEST_CASE("sphere metric matches the embedded arc-length oracle") {
    const auto m = ManifoldSpec::sphere();
    Eigen::VectorXd q(2);
    q << kPi / 2.0, 0.0;
    const MetricJet jet = metric_jet(m, {q, 0});
    CHECK(jet.g(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(jet.g(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(jet.g(0, 1)) < 1e-14);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> phi_dist(kPi / 4.0, 3.0 * kPi / 4.0);
    std::uniform_real_distribution<double> theta_dist(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd qq(2);
        qq << phi_dist(rng), theta_dist(rng);
        const ChartPoint p{qq, trial % 2};
        const MetricJet j = metric_jet(m, p);
        const Eigen::Matrix2d oracle = embedded_metric_fd(p);
        CHECK((j.g - oracle).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("sphere has constant sectional curvature one") {
    const auto m = ManifoldSpec::sphere();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> phi_dist(kPi / 4.0, 3.0 * kPi / 4.0);
    std::uniform_real_distribution<double> theta_dist(0.0, 2.0 * kPi);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SUBCASE("spot value at phi = pi/3") {
        Eigen::VectorXd q(2);
        q << kPi / 3.0, 1.0;
        const MetricJet jet = metric_jet(m, {q, 0});
        const Eigen::Vector2d x(1.0, 0.0), y(0.0, 1.0);
        const double num = (jet.g * riemann_apply(jet, x, y, y)).dot(x);
        const double den = (jet.g * x).dot(x) * (jet.g * y).dot(y) - std::pow((jet.g * x).dot(y), 2);
        CHECK(num / den == doctest::Approx(1.0).epsilon(1e-10));
    }

    SUBCASE("constant-curvature identity at random points") {
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd q(2);
            q << phi_dist(rng), theta_dist(rng);
            const ChartPoint p{q, trial % 2};
            const MetricJet jet = metric_jet(m, p);
            const Eigen::Vector2d x(gauss(rng), gauss(rng));
            const Eigen::Vector2d y(gauss(rng), gauss(rng));
            const Eigen::Vector2d lhs = riemann_apply(jet, x, y, y);
            const double yy = (jet.g * y).dot(y), xy = (jet.g * x).dot(y);
            const Eigen::Vector2d rhs = yy * x - xy * y;
            CHECK((lhs - rhs).norm() < 1e-9 * std::max(1.0, rhs.norm()));
        }
    }
}

TEST_CASE("christoffel symmetry and bianchi antisymmetries") {
    const auto m = ManifoldSpec::sphere();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> phi_dist(kPi / 4.0, 3.0 * kPi / 4.0);
    std::uniform_real_distribution<double> theta_dist(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 25; ++trial) {
        Eigen::VectorXd q(2);
        q << phi_dist(rng), theta_dist(rng);
        const MetricJet jet = metric_jet(m, {q, trial % 2});
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    CHECK(jet.christoffel(k, i, j) == jet.christoffel(k, j, i));
        for (int l = 0; l < 2; ++l)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 2; ++k) {
                        CHECK(std::abs(jet.riemann(l, i, j, k) + jet.riemann(l, i, k, j)) < 1e-12);
                        const double cyc = jet.riemann(l, i, j, k) + jet.riemann(l, j, k, i) +
                                           jet.riemann(l, k, i, j);
                        CHECK(std::abs(cyc) < 1e-12);
                    }
    }
}

TEST_CASE("potential jets on the circle and torus") {
    const auto m = ManifoldSpec::circle();
    const auto pendulum = PotentialSpec::pendulum();

    SUBCASE("pendulum potential at the maximum") {
        const ScalarJet j = potential_jet(m, pendulum, {Eigen::VectorXd::Zero(1), 0});
        CHECK(j.value == doctest::Approx(1.0));
        CHECK(std::abs(j.gradient(0)) < 1e-15);
        CHECK(j.hessian(0, 0) == doctest::Approx(-1.0));
    }
    SUBCASE("pendulum potential at the minimum") {
        const ScalarJet j = potential_jet(m, pendulum, {Eigen::VectorXd::Constant(1, kPi), 0});
        CHECK(j.value == doctest::Approx(-1.0));
        CHECK(std::abs(j.gradient(0)) < 1e-15);
        CHECK(j.hessian(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("separable torus potential") {
        const auto t2 = ManifoldSpec::flat_torus(2);
        const auto pot = PotentialSpec::torus_cosines(2);
        Eigen::VectorXd q(2);
        q << kPi, kPi;
        const ScalarJet j = potential_jet(t2, pot, {q, 0});
        CHECK((j.hessian - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("covariant hessian is symmetric on the sphere") {
    const auto m = ManifoldSpec::sphere();
    const auto pot = PotentialSpec::sphere_basis({0.2, -0.1, 0.3, 0.0, 0.15, 0.0, 0.05, 0.1});
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> phi_dist(kPi / 4.0, 3.0 * kPi / 4.0);
    std::uniform_real_distribution<double> theta_dist(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd q(2);
        q << phi_dist(rng), theta_dist(rng);
        const ScalarJet j = potential_jet(m, pot, {q, trial % 2});
        CHECK(std::abs(j.hessian(0, 1) - j.hessian(1, 0)) < 1e-12);
    }
}

TEST_CASE("sphere potential jets agree with finite differences") {
    const auto m = ManifoldSpec::sphere();
    const auto pot = PotentialSpec::sphere_basis({0.2, -0.1, 0.3, 0.07, 0.15, -0.2, 0.05, 0.1});
    Eigen::VectorXd q(2);
    q << 1.1, 2.3;
    const ChartPoint p{q, 0};
    const ScalarJet j = potential_jet(m, pot, p);
    const double h = 1e-5;
    for (int i = 0; i < 2; ++i) {
        ChartPoint pp = p, pm = p;
        pp.q(i) += h;
        pm.q(i) -= h;
        const double fd = (potential_jet(m, pot, pp).value - potential_jet(m, pot, pm).value) / (2 * h);
        CHECK(j.gradient(i) == doctest::Approx(fd).epsilon(1e-8));
        for (int k = 0; k < 2; ++k) {
            const double fd2 = (potential_jet(m, pot, pp).gradient(k) -
                                potential_jet(m, pot, pm).gradient(k)) / (2 * h);
            CHECK(j.hessian_coord(k, i) == doctest::Approx(fd2).epsilon(1e-6));
        }
    }
}

TEST_CASE("normalize_point wraps and re-charts") {
    SUBCASE("circle wrap") {
        const auto m = ManifoldSpec::circle();
        const ChartPoint p = normalize_point(m, {Eigen::VectorXd::Constant(1, 7.0), 0});
        CHECK(p.q(0) == doctest::Approx(7.0 - 2.0 * kPi).epsilon(1e-14));
    }
    SUBCASE("torus wrap") {
        const auto m = ManifoldSpec::flat_torus(2);
        Eigen::VectorXd q(2);
        q << -0.1, 6.4;
        const ChartPoint p = normalize_point(m, {q, 0});
        CHECK(p.q(0) == doctest::Approx(2.0 * kPi - 0.1).epsilon(1e-14));
        CHECK(p.q(1) == doctest::Approx(6.4 - 2.0 * kPi).epsilon(1e-14));
    }
    SUBCASE("sphere leaves a polar cap by switching charts") {
        const auto m = ManifoldSpec::sphere();
        Eigen::VectorXd q(2);
        q << 0.01, 0.7;
        const ChartPoint before{q, 0};
        const ChartPoint after = normalize_point(m, before);
        CHECK(after.chart == 1);
        CHECK(sphere_pole_distance(after) > sphere_pole_distance(before));
        CHECK((sphere_embed(after) - sphere_embed(before)).norm() < 1e-12);
    }
}

TEST_CASE("index raising, lowering and the dual norm") {
    SUBCASE("euclidean co-norm") {
        const auto m = ManifoldSpec::flat_torus(2);
        Eigen::VectorXd q(2);
        q << 1.0, 2.0;
        const MetricJet jet = metric_jet(m, {q, 0});
        Eigen::VectorXd xi(2);
        xi << 3.0, 4.0;
        CHECK(co_norm(jet, xi) == doctest::Approx(5.0));
    }
    SUBCASE("sphere equator azimuth covector") {
        const auto m = ManifoldSpec::sphere();
        Eigen::VectorXd q(2);
        q << kPi / 2.0, 0.0;
        const MetricJet jet = metric_jet(m, {q, 0});
        Eigen::VectorXd xi(2);
        xi << 0.0, 1.0;
        CHECK(co_norm(jet, xi) == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("raise then lower is the identity") {
        const auto m = ManifoldSpec::sphere();
        std::mt19937 rng(13);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> phi_dist(kPi / 4.0, 3.0 * kPi / 4.0);
        for (int trial = 0; trial < 30; ++trial) {
            Eigen::VectorXd q(2);
            q << phi_dist(rng), gauss(rng);
            const MetricJet jet = metric_jet(m, {q, 0});
            Eigen::VectorXd xi(2);
            xi << gauss(rng), gauss(rng);
            const Eigen::VectorXd round = lower_index(jet, raise_index(jet, xi));
            CHECK((round - xi).norm() < 1e-14 * std::max(1.0, xi.norm()));
        }
    }
}

TEST_CASE("sphere chart transition preserves the co-norm") {
    const auto m = ManifoldSpec::sphere();
    std::mt19937 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phi_dist(kPi / 3.0, 2.0 * kPi / 3.0);
    std::uniform_real_distribution<double> theta_dist(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 40; ++trial) {
        Eigen::VectorXd q(2);
        q << phi_dist(rng), theta_dist(rng);
        ChartPoint p{q, 0};
        Eigen::VectorXd xi(2);
        xi << gauss(rng), gauss(rng);
        const double norm0 = co_norm(metric_jet(m, p), xi);

        ChartPoint p1 = p;
        Eigen::VectorXd xi1 = xi;
        sphere_transition(m, p1, xi1, 1);
        if (sphere_pole_distance(p1) < m.sphere_chart_switch) continue;
        const double norm1 = co_norm(metric_jet(m, p1), xi1);
        CHECK(norm1 == doctest::Approx(norm0).epsilon(1e-10));

        // and back
        ChartPoint p0 = p1;
        Eigen::VectorXd xi0 = xi1;
        sphere_transition(m, p0, xi0, 0);
        CHECK((xi0 - xi).norm() < 1e-10 * std::max(1.0, xi.norm()));
    }
}

TEST_CASE("chart domain errors") {
    const auto m = ManifoldSpec::sphere();
    Eigen::VectorXd q(2);
    q << 0.01, 0.0;
    CHECK_THROWS_AS(metric_jet(m, {q, 0}), ChartDomainError);
}
