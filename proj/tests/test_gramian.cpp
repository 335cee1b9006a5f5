#include <cmath>

#include "doctest.h"
#include "ltv/duality.hpp"
#include "ltv/gramian.hpp"
#include "oracles.hpp"

using namespace ltv;

namespace {

const double kW11 = (1.0 - std::exp(-2.0)) / 2.0;

}  // namespace

TEST_CASE("scalar closed forms") {
    SUBCASE("A = 0") {
        const auto sys = oracle::scalar_system(0.0, 1.0, 1.0, 1.0, 100);
        CHECK(std::abs(ctrl_gramian_quadrature(Propagator(sys)).W(0, 0) - 1.0) <= 1e-8);
        CHECK(std::abs(ctrl_gramian_lyapunov(sys).W(0, 0) - 1.0) <= 1e-10);
        const auto Q = obs_gramian(Propagator(sys));
        CHECK(std::abs(Q.W(0, 0) - 1.0) <= 1e-8);
        CHECK(observability_constant(Q) == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("A = 1") {
        const auto sys = oracle::scalar_system(1.0, 1.0, 1.0, 1.0, 200);
        CHECK(std::abs(ctrl_gramian_quadrature(Propagator(sys), Quadrature::Simpson).W(0, 0) - kW11) <= 1e-7);
        CHECK(std::abs(ctrl_gramian_lyapunov(sys).W(0, 0) - kW11) <= 1e-8);
        const auto Q = obs_gramian(Propagator(sys), Quadrature::Simpson);
        CHECK(std::abs(observability_constant(Q) - std::sqrt(kW11)) <= 1e-6);
    }
    SUBCASE("a in {0.5, 1, 2}") {
        for (double a : {0.5, 1.0, 2.0}) {
            const auto   sys   = oracle::scalar_system(a, 1.0, 1.0, 1.0, 200);
            const double exact = (1.0 - std::exp(-2.0 * a)) / (2.0 * a);
            CHECK(std::abs(ctrl_gramian_quadrature(Propagator(sys), Quadrature::Simpson).W(0, 0) - exact) <= 1e-7);
            CHECK(std::abs(ctrl_gramian_lyapunov(sys).W(0, 0) - exact) <= 1e-7);
        }
    }
    SUBCASE("B = 0 and C = 0") {
        const auto sys = oracle::constant_system(Matrix::Identity(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2), 1.0, 50);
        CHECK(ctrl_gramian_quadrature(Propagator(sys)).W.norm() == 0.0);
        CHECK(ctrl_gramian_lyapunov(sys).W.norm() == 0.0);
        CHECK(obs_gramian(Propagator(sys)).W.norm() == 0.0);
    }
}

TEST_CASE("quadrature and Lyapunov methods agree") {
    Lcg64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int  n   = 1 + trial % 6;
        const auto sys = oracle::random_poly_system(rng, n, 1 + trial % 2, 1, trial % 4, 1.0, 200);
        auto       q   = ctrl_gramian_quadrature(Propagator(sys), Quadrature::Simpson);
        auto       l   = ctrl_gramian_lyapunov(sys);
        const double r = cross_check(q, l);
        CHECK(r <= 1e-6 * (1.0 + q.W.norm()));
        CHECK(q.cross_residual.value() == r);
        CHECK(l.cross_residual.value() == r);
    }
}

TEST_CASE("result invariants") {
    Lcg64      rng(1);
    const auto sys = oracle::random_poly_system(rng, 5, 2, 2, 3, 1.0, 100);
    const auto g   = ctrl_gramian_quadrature(Propagator(sys));
    CHECK((g.W - g.W.transpose()).norm() == 0.0);
    CHECK(g.eigenvalues.size() == 5);
    for (Eigen::Index i = 1; i < 5; ++i) CHECK(g.eigenvalues(i) >= g.eigenvalues(i - 1));
    CHECK(g.eigenvalues.minCoeff() >= -1e-10 * g.lambda_max);
    CHECK(g.lambda_min == g.eigenvalues(0));
    CHECK(g.lambda_max == g.eigenvalues(4));
}

TEST_CASE("Gramian as the operator Psi Psi^*") {
    Lcg64            rng(77);
    const Propagator prop(oracle::random_poly_system(rng, 4, 2, 1, 2, 1.2, 150));
    const auto       W = ctrl_gramian_quadrature(prop);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector z  = oracle::random_matrix(rng, 4, 1);
        const double lhs = z.dot(W.W * z);
        const double rhs = std::pow(l2_norm(input_map_adjoint(prop, z)), 2);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * z.squaredNorm());
    }
}

TEST_CASE("coercivity_check") {
    CHECK(coercivity_check(make_gramian_result(Matrix::Identity(2, 2), GramianKind::Controllability, GramianMethod::Quadrature))
              .coercive);
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0)  = 1.0;
    const auto c = coercivity_check(make_gramian_result(D, GramianKind::Controllability, GramianMethod::Quadrature));
    CHECK_FALSE(c.coercive);
    CHECK(c.lambda_min == 0.0);
    const auto s = coercivity_check(
        make_gramian_result(Matrix::Constant(1, 1, 0.432332), GramianKind::Controllability, GramianMethod::Quadrature), 1e-10);
    CHECK(s.coercive);
    CHECK(s.lambda_min == 0.432332);
}

TEST_CASE("lambda_min grows with the horizon for time-invariant systems") {
    Lcg64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const int    n = 2 + trial % 3;
        const Matrix A = oracle::random_matrix(rng, n, n);
        const Matrix B = oracle::random_matrix(rng, n, 1);
        double       previous = 0.0;
        for (double tau : {0.5, 1.0, 2.0}) {
            const auto g = ctrl_gramian_quadrature(
                Propagator(oracle::constant_system(A, B, Matrix::Ones(1, n), tau, static_cast<int>(400 * tau))),
                Quadrature::Simpson);
            CHECK(g.lambda_min >= previous * (1.0 - 1e-8));
            previous = g.lambda_min;
        }
    }
}

TEST_CASE("lambda_min can shrink with the horizon when B switches off") {
    // x' = -5x + (1 - t)u: almost no input after t = 1 while the state keeps decaying.
    auto make = [](double tau) {
        return LtvSystem(CoeffMatrixFn::constant(Matrix::Constant(1, 1, 5.0), tau),
                         CoeffMatrixFn::polynomial({Matrix::Ones(1, 1), -Matrix::Ones(1, 1)}, tau),
                         CoeffMatrixFn::constant(Matrix::Ones(1, 1), tau), TimeGrid::uniform(tau, 400));
    };
    const double w1 = ctrl_gramian_quadrature(Propagator(make(1.0)), Quadrature::Simpson).lambda_min;
    const double w2 = ctrl_gramian_quadrature(Propagator(make(1.05)), Quadrature::Simpson).lambda_min;
    CHECK(w2 < 0.7 * w1);
}

TEST_CASE("vanishing direction of a singular Gramian") {
    // Second state is neither driven nor coupled.
    Matrix A(2, 2);
    A << 1.0, 0.3, 0.0, 0.5;
    Matrix B(2, 1);
    B << 1.0, 0.0;
    const auto g = ctrl_gramian_quadrature(Propagator(oracle::constant_system(A, B, Matrix::Ones(1, 2), 1.0, 100)));
    CHECK_FALSE(coercivity_check(g).coercive);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g.W);
    const Vector                          z = es.eigenvectors().col(0);
    CHECK(z.norm() == doctest::Approx(1.0));
    CHECK(z.dot(g.W * z) <= 1e-8);
}
