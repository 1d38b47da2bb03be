#include "doctest.h"

#include <cmath>

#include "synthesol/curvature.hpp"

using namespace synthesol;

namespace {

constexpr double kPi = EIGEN_PI;

const ManifoldSpec& circle() {
    static const ManifoldSpec m = ManifoldSpec::circle();
    return m;
}
const PotentialSpec& pendulum() {
    static const PotentialSpec p = PotentialSpec::pendulum();
    return p;
}

CotangentState sphere_state(double phi, double theta, double xi_phi, double xi_theta, int chart = 0) {
    Eigen::VectorXd q(2), xi(2);
    q << phi, theta;
    xi << xi_phi, xi_theta;
    return {q, xi, chart};
}

} // namespace

TEST_CASE("curvature operator on the pendulum is the potential hessian") {
    SUBCASE("at the maximum") {
        const auto op = curvature_operator(circle(), pendulum(), CotangentState::on_circle(0.0, 0.7));
        CHECK(op.matrix(0, 0) == doctest::Approx(-1.0));
        CHECK(op.eigenvalues(0) == doctest::Approx(-1.0));
    }
    SUBCASE("at the minimum") {
        const auto op = curvature_operator(circle(), pendulum(), CotangentState::on_circle(kPi, -1.2));
        CHECK(op.matrix(0, 0) == doctest::Approx(1.0));
        CHECK(op.eigenvalues(0) == doctest::Approx(1.0));
    }
}

TEST_CASE("round sphere with zero potential reproduces constant curvature") {
    const auto m = ManifoldSpec::sphere();
    const auto zero = PotentialSpec::zero();

    SUBCASE("unit covector at the equator") {
        // |z| = 1 along the colatitude axis; the orthogonal direction is an
        // eigenvector with eigenvalue |z|^2 = 1 and z itself has eigenvalue 0.
        const auto op = curvature_operator(m, zero, sphere_state(kPi / 2.0, 0.3, 1.0, 0.0));
        Eigen::Vector2d zeta(0.0, 1.0);
        const Eigen::Vector2d image = op.matrix * zeta;
        CHECK((image - zeta).norm() < 1e-12);
        CHECK(op.eigenvalues.minCoeff() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(op.eigenvalues.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("riemann term is quadratic in the base covector") {
        const auto z1 = sphere_state(1.1, 0.4, 0.3, -0.5, 0);
        auto z2 = z1;
        z2.xi *= 2.0;
        const auto op1 = curvature_operator(m, zero, z1);
        const auto op2 = curvature_operator(m, zero, z2);
        CHECK((op2.matrix - 4.0 * op1.matrix).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("curvature operator is metric self-adjoint") {
    const auto m = ManifoldSpec::sphere();
    const auto pot = PotentialSpec::sphere_basis({0.1, -0.2, 0.3, 0.05, 0.0, 0.12, -0.07, 0.2});
    for (const auto& z : sample_B_H(m, pot, 8)) {
        const auto op = curvature_operator(m, pot, z);
        const MetricJet g = metric_jet(m, z.point());
        const Eigen::MatrixXd sym = g.g_inv * op.matrix;
        CHECK((sym - sym.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("flat charts reduce the operator to the covariant hessian") {
    const auto t2 = ManifoldSpec::flat_torus(2);
    const auto pot = PotentialSpec::torus_cosines(2);
    for (const auto& z : sample_B_H(t2, pot, 6)) {
        const auto op = curvature_operator(t2, pot, z);
        const ScalarJet u = potential_jet(t2, pot, z.point());
        CHECK((op.matrix - u.hessian).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("B_H sampling respects the energy radii") {
    const auto samples = sample_B_H(circle(), pendulum(), 64);

    SUBCASE("only the zero covector survives at the potential maximum") {
        for (const auto& z : samples)
            if (std::abs(z.q(0)) < 1e-12) CHECK(z.xi.norm() == 0.0);
    }
    SUBCASE("the shell at the minimum reaches |xi| = 2") {
        double top = 0.0;
        for (const auto& z : samples)
            if (std::abs(z.q(0) - kPi) < 1e-12) top = std::max(top, z.xi.norm());
        CHECK(top == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("every sample stays inside B_H") {
        for (const auto& z : samples)
            CHECK(hamiltonian(circle(), pendulum(), z) <= 1.0 + 1e-12);
    }
    SUBCASE("count matches the stratification") {
        // one zero-section sample per grid node plus dirs x radii wherever
        // the local radius is positive
        std::size_t expected = 0;
        for (int i = 0; i < 64; ++i) {
            const double th = 2.0 * kPi * i / 64;
            expected += 1;
            if (1.0 - std::cos(th) > 0.0) expected += 2 * 8;
        }
        CHECK(samples.size() == expected);
    }
}

TEST_CASE("condition check on the pendulum") {
    SUBCASE("alpha 3 passes with the sharp threshold") {
        const auto rep = check_condition(circle(), pendulum(), 3.0, 64);
        CHECK(rep.pass);
        CHECK(rep.lambda_max == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.alpha_critical == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(rep.margin == doctest::Approx(1.25).epsilon(1e-9));
        CHECK(rep.samples_used > 1000);
    }
    SUBCASE("alpha 1.5 fails") {
        const auto rep = check_condition(circle(), pendulum(), 1.5, 64);
        CHECK_FALSE(rep.pass);
        CHECK(rep.lambda_max == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.alpha_critical == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("zero potential is unconditionally smooth") {
        const auto t2 = ManifoldSpec::flat_torus(2);
        const auto rep = check_condition(t2, PotentialSpec::zero(), 0.5, 16);
        CHECK(rep.pass);
        CHECK(std::abs(rep.lambda_max) < 1e-12);
        CHECK(rep.alpha_critical == doctest::Approx(0.0));
    }
}

TEST_CASE("corollary bound") {
    SUBCASE("pendulum at alpha 3") {
        const auto b = corollary_bound(circle(), pendulum(), 3.0);
        CHECK(b.rhs == doctest::Approx(2.25));
        CHECK(b.max_hessian_eigenvalue == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(b.pass);
    }
    SUBCASE("sphere potential with range 0.5") {
        const auto m = ManifoldSpec::sphere();
        const auto pot = PotentialSpec::sphere_basis({0.0, 0.0, 0.25});
        const auto b = corollary_bound(m, pot, 3.0);
        CHECK(b.rhs == doctest::Approx(2.25 - 2.0 * 0.5).epsilon(1e-9));
        CHECK(b.pass); // hessian eigenvalues stay within 0.25
        CHECK(b.max_hessian_eigenvalue < 0.3);
    }
    SUBCASE("zero potential on the sphere passes at tiny alpha") {
        const auto m = ManifoldSpec::sphere();
        const auto b = corollary_bound(m, PotentialSpec::zero(), 0.1);
        CHECK(b.rhs == doctest::Approx(0.0025));
        CHECK(b.pass);
    }
}

TEST_CASE("the corollary is more conservative than the sampled condition") {
    const auto m = ManifoldSpec::sphere();
    const auto pot = PotentialSpec::sphere_basis({0.0, 0.0, 0.2, 0.0, 0.0, 0.1});
    for (double alpha : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        const auto cor = corollary_bound(m, pot, alpha);
        if (!cor.pass) continue;
        const auto rep = check_condition(m, pot, alpha, 12);
        CHECK(rep.pass);
    }
    for (double alpha : {1.0, 1.9, 2.1, 3.0, 5.0}) {
        const auto cor = corollary_bound(circle(), pendulum(), alpha);
        if (!cor.pass) continue;
        const auto rep = check_condition(circle(), pendulum(), alpha, 32);
        CHECK(rep.pass);
    }
}
