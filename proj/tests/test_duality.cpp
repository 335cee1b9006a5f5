#include <cmath>
#include <limits>

#include "doctest.h"
#include "ltv/duality.hpp"
#include "oracles.hpp"

using namespace ltv;

namespace {

const double kW11 = (1.0 - std::exp(-2.0)) / 2.0;

ControlSignal random_signal(Lcg64& rng, const TimeGrid& g, int m) {
    return ControlSignal(g, oracle::random_matrix(rng, m, g.steps() + 1));
}

}  // namespace

TEST_CASE("input_map and its adjoint") {
    const Propagator flat(oracle::scalar_system(0.0, 1.0, 1.0, 1.0, 100));
    const auto       one = ControlSignal::sample(flat.grid(), 1, [](double) { return Vector::Ones(1); });
    CHECK(std::abs(input_map(flat, one)(0) - 1.0) <= 1e-8);
    CHECK(input_map(flat, ControlSignal::zero(flat.grid(), 1)).norm() == 0.0);
    CHECK(input_map_adjoint(flat, Vector::Ones(1)).values().isApprox(Matrix::Ones(1, 101)));
    CHECK(input_map_adjoint(flat, Vector::Zero(1)).values().norm() == 0.0);

    const Propagator decay(oracle::scalar_system(1.0, 1.0, 1.0, 1.0, 200));
    const auto       u = ControlSignal::sample(decay.grid(), 1, [](double s) { return Vector::Constant(1, std::exp(-(1 - s))); });
    CHECK(std::abs(input_map(decay, u, Quadrature::Simpson)(0) - kW11) <= 1e-7);
    const auto adj = input_map_adjoint(decay, Vector::Ones(1));
    CHECK(std::abs(adj.at(0)(0) - std::exp(-1.0)) <= 1e-9);

    // input_map equals propagate_state from rest
    Lcg64            rng(3);
    const Propagator prop(oracle::random_poly_system(rng, 3, 2, 1, 2, 1.0, 80));
    const auto       w = random_signal(rng, prop.grid(), 2);
    CHECK((input_map(prop, w) - prop.propagate_state(Vector::Zero(3), w, 80)).norm() <= 1e-14);
}

TEST_CASE("adjoint and key identities") {
    Lcg64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int        n = 1 + trial % 5;
        const Propagator prop(oracle::random_poly_system(rng, n, 2, 1, trial % 4, 1.0, 100));
        for (int k = 0; k < 20; ++k) {
            const auto   u     = random_signal(rng, prop.grid(), 2);
            const Vector z     = oracle::random_matrix(rng, n, 1);
            const double scale = l2_norm(u) * z.norm();
            CHECK(adjoint_identity_residual(prop, u, z) <= 1e-8 * scale);
            CHECK(key_identity_residual(prop, u, z) <= 1e-8 * scale);
            CHECK(adjoint_identity_residual(prop, u, z, Quadrature::Simpson) <= 1e-8 * l2_norm(u, Quadrature::Simpson) * z.norm());
        }
        CHECK(adjoint_identity_residual(prop, ControlSignal::zero(prop.grid(), 2), Vector::Ones(n)) == 0.0);
        CHECK(key_identity_residual(prop, random_signal(rng, prop.grid(), 2), Vector::Zero(n)) == 0.0);
    }
    const Propagator flat(oracle::scalar_system(0.0, 1.0, 1.0, 1.0, 100));
    CHECK(key_identity_residual(flat, ControlSignal::sample(flat.grid(), 1, [](double) { return Vector::Ones(1); }),
                                Vector::Ones(1)) <= 1e-8);
}

TEST_CASE("exact controllability agrees with the Kalman rank oracle") {
    Lcg64 rng(123);
    int   disagreements = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 4;
        const int m = 1 + trial % 2;
        Matrix    A, B;
        if (trial % 2 == 0) {
            A = oracle::random_matrix(rng, n, n);
            B = oracle::random_matrix(rng, n, m);
        } else {
            std::tie(A, B) = oracle::uncontrollable_pair(rng, n, m);
        }
        const auto report  = exact_controllability_test(oracle::constant_system(A, B, Matrix::Ones(1, n), 1.0, 100));
        const bool kalman  = oracle::kalman_rank(-A, B) == n;
        disagreements     += report.controllable != kalman;
        CHECK(report.controllable == (trial % 2 == 0));
    }
    CHECK(disagreements == 0);
}

TEST_CASE("report examples") {
    SUBCASE("A = 0, B = 1") {
        const auto r = exact_controllability_test(oracle::scalar_system(0.0, 1.0, 1.0, 2.0, 100));
        CHECK(r.controllable);
        CHECK(r.obs_constant_delta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    }
    SUBCASE("B = 0") {
        const auto r =
            exact_controllability_test(oracle::constant_system(Matrix::Identity(2, 2), Matrix::Zero(2, 1), Matrix::Ones(1, 2), 1.0, 50));
        CHECK_FALSE(r.controllable);
        CHECK(r.lambda_min_W == 0.0);
        CHECK_FALSE(r.null_controllable);
        CHECK(std::isinf(r.null_inclusion_c));
    }
    SUBCASE("double integrator") {
        Matrix A(2, 2);
        A << 0, 1, 0, 0;
        Matrix B(2, 1);
        B << 0, 1;
        CHECK(oracle::kalman_rank(-A, B) == 2);
        CHECK(exact_controllability_test(oracle::constant_system(A, B, Matrix::Ones(1, 2), 1.0, 100)).controllable);
    }
    SUBCASE("delta squared is lambda_min") {
        Lcg64            rng(9);
        const Propagator prop(oracle::random_poly_system(rng, 3, 1, 1, 2, 1.0, 100));
        const auto       r = exact_controllability_test(prop);
        CHECK(r.obs_constant_delta * r.obs_constant_delta == doctest::Approx(r.lambda_min_W).epsilon(1e-8));

        const auto W = ctrl_gramian_quadrature(prop);
        Eigen::SelfAdjointEigenSolver<Matrix> es(W.W);
        CHECK(std::abs(std::pow(l2_norm(input_map_adjoint(prop, es.eigenvectors().col(0))), 2) - r.lambda_min_W) <= 1e-8);
        for (int k = 0; k < 100; ++k) {
            const Vector z = oracle::random_matrix(rng, 3, 1);
            CHECK(z.norm() <= l2_norm(input_map_adjoint(prop, z)) / r.obs_constant_delta * (1 + 1e-10));
        }
    }
}

TEST_CASE("admissibility_constant") {
    CHECK(admissibility_constant(Propagator(oracle::scalar_system(1.0, 1.0, 0.0, 1.0, 50))) == 0.0);
    CHECK(admissibility_constant(Propagator(oracle::scalar_system(0.0, 1.0, 1.0, 1.0, 100))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(admissibility_constant(Propagator(oracle::scalar_system(1.0, 1.0, 1.0, 1.0, 200)), Quadrature::Simpson) -
                   std::sqrt(kW11)) <= 1e-6);

    // every window energy is bounded by M^2
    Lcg64            rng(21);
    const Propagator prop(oracle::random_poly_system(rng, 3, 1, 2, 2, 1.0, 60));
    const double     M = admissibility_constant(prop);
    const auto&      g = prop.grid();
    for (int s = 0; s < 60; s += 7) {
        const Vector x = oracle::random_matrix(rng, 3, 1);
        const auto   w = quadrature_weights(g, Quadrature::Trapezoid, s, 60);
        double       energy = 0.0;
        for (int t = s; t <= 60; ++t)
            energy += w[static_cast<std::size_t>(t)] * (prop.system().C(g[t]) * prop.transition(s, t) * x).squaredNorm();
        CHECK(energy <= M * M * x.squaredNorm() * (1 + 1e-10));
    }
}

TEST_CASE("null controllability") {
    SUBCASE("scalar value of c") {
        const auto   nc    = null_controllability_test(Propagator(oracle::scalar_system(1.0, 1.0, 1.0, 1.0, 1000)),
                                                       {Quadrature::Simpson});
        const double exact = std::exp(-1.0) / std::sqrt(kW11);
        CHECK(nc.feasible);
        CHECK(std::abs(nc.c - exact) <= 1e-9);
    }
    SUBCASE("A = 0, B = 0 is infeasible") {
        const auto nc = null_controllability_test(Propagator(oracle::scalar_system(0.0, 0.0, 1.0, 1.0, 50)));
        CHECK_FALSE(nc.feasible);
        CHECK(nc.c == std::numeric_limits<double>::infinity());
    }
    SUBCASE("U(tau,0) is invertible, so null controllability coincides with controllability") {
        Matrix A = Matrix::Zero(2, 2);
        A(0, 0)  = 1.0;
        Matrix B = Matrix::Zero(2, 1);
        B(0, 0)  = 1.0;
        const auto r = exact_controllability_test(oracle::constant_system(A, B, Matrix::Ones(1, 2), 1.0, 100));
        CHECK_FALSE(r.controllable);
        CHECK_FALSE(r.null_controllable);
    }
    SUBCASE("inclusion inequality on random z") {
        Lcg64            rng(31);
        const Propagator prop(oracle::random_poly_system(rng, 3, 1, 1, 2, 1.0, 200));
        const auto       nc = null_controllability_test(prop);
        REQUIRE(nc.feasible);
        const Matrix S = prop.transition(0, 200);
        for (int k = 0; k < 100; ++k) {
            const Vector z = oracle::random_matrix(rng, 3, 1);
            CHECK((S.transpose() * z).norm() <= (nc.c + 1e-8) * l2_norm(input_map_adjoint(prop, z)));
        }
    }
}
