#include "ltv/duality.hpp"

#include <algorithm>
#include <cmath>

namespace ltv {

namespace {

void require_signal(const Propagator& prop, const ControlSignal& u) {
    if (!(u.grid() == prop.grid())) throw DomainError("control signal grid differs from the propagator grid");
    if (u.dim() != prop.system().m()) throw DomainError("control signal has wrong dimension");
}

void require_state(const Propagator& prop, const Vector& z) {
    if (z.size() != prop.system().n()) throw DomainError("state vector has wrong dimension");
}

}  // namespace

Vector input_map(const Propagator& prop, const ControlSignal& u, Quadrature rule) {
    require_signal(prop, u);
    const auto& sys = prop.system();
    const auto& g   = prop.grid();
    const auto  w   = quadrature_weights(g, rule);
    Vector      x   = Vector::Zero(sys.n());
    for (int i = 0; i <= g.steps(); ++i) x += w[i] * (prop.to_final(i) * (sys.B(g[i]) * u.values().col(i)));
    return x;
}

ControlSignal input_map_adjoint(const Propagator& prop, const Vector& z) {
    require_state(prop, z);
    const auto& sys = prop.system();
    const auto& g   = prop.grid();
    Matrix      values(sys.m(), g.steps() + 1);
    for (int i = 0; i <= g.steps(); ++i) values.col(i) = sys.B(g[i]).transpose() * (prop.to_final(i).transpose() * z);
    return ControlSignal(g, std::move(values));
}

double adjoint_identity_residual(const Propagator& prop, const ControlSignal& u, const Vector& z, Quadrature rule) {
    const double lhs = input_map(prop, u, rule).dot(z);
    const double rhs = l2_inner(u, input_map_adjoint(prop, z), rule);
    return std::abs(lhs - rhs);
}

double key_identity_residual(const Propagator& prop, const ControlSignal& u, const Vector& z_tau, Quadrature rule) {
    require_signal(prop, u);
    require_state(prop, z_tau);
    const auto& sys = prop.system();
    const auto& g   = prop.grid();

    const Vector x_tau = prop.propagate_state(Vector::Zero(sys.n()), u, g.steps(), rule);
    const double lhs   = x_tau.dot(z_tau);

    Matrix h(sys.m(), g.steps() + 1);
    for (int i = 0; i <= g.steps(); ++i) h.col(i) = sys.B(g[i]).transpose() * prop.adjoint_state(z_tau, i);
    const double rhs = l2_inner(u, ControlSignal(g, std::move(h)), rule);
    return std::abs(lhs - rhs);
}

double admissibility_constant(const Propagator& prop, Quadrature rule) {
    const auto& sys = prop.system();
    const auto& g   = prop.grid();
    const int   N   = g.steps();
    const int   n   = sys.n();

    std::vector<Matrix> C(static_cast<std::size_t>(N) + 1);
    for (int j = 0; j <= N; ++j) C[j] = sys.C(g[j]);

    double best = 0.0;
    for (int s = 0; s < N; ++s) {
        const auto w = quadrature_weights(g, rule, s, N);
        Matrix     R = Matrix::Zero(n, n);
        Matrix     V = Matrix::Identity(n, n);  // U(t_j, t_s)
        for (int j = s; j <= N; ++j) {
            if (j > s) V = prop.step(j - 1) * V;
            const Matrix CV = C[j] * V;
            R.noalias() += w[j] * (CV.transpose() * CV);
        }
        R = 0.5 * (R + R.transpose()).eval();
        const double top = Eigen::SelfAdjointEigenSolver<Matrix>(R, Eigen::EigenvaluesOnly).eigenvalues()(n - 1);
        best = std::max(best, top);
    }
    return std::sqrt(best);
}

NullControllability null_controllability_test(const Propagator& prop, const GramianResult& W,
                                              const DualityOptions& opts) {
    const int n = prop.system().n();
    Eigen::SelfAdjointEigenSolver<Matrix> es(W.W);
    const Vector& ev   = es.eigenvalues();
    const double  lmax = ev(n - 1);

    std::vector<int> kept;
    if (lmax > 0.0)
        for (int k = 0; k < n; ++k)
            if (ev(k) > opts.coercivity_tol * lmax) kept.push_back(k);
    if (kept.empty()) {
        // W = 0: only the zero map is included, and U(tau,0) is invertible.
        return {false, std::numeric_limits<double>::infinity()};
    }

    Matrix Vr(n, static_cast<Eigen::Index>(kept.size()));
    Vector lr(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) {
        Vr.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(kept[k]);
        lr(static_cast<Eigen::Index>(k))     = ev(kept[k]);
    }

    const Matrix& S = prop.to_final(0);
    for (int j = 0; j < n; ++j) {
        const Vector col      = S.col(j);
        const Vector residual = col - Vr * (Vr.transpose() * col);
        if (residual.norm() > opts.range_tol * col.norm()) return {false, std::numeric_limits<double>::infinity()};
    }

    // max over z in Ran W of |S^T z|^2 / <W z, z>
    const Matrix scaled = lr.cwiseSqrt().cwiseInverse().asDiagonal() * (Vr.transpose() * S);
    Matrix       P      = scaled * scaled.transpose();
    P                   = 0.5 * (P + P.transpose()).eval();
    const Vector pev    = Eigen::SelfAdjointEigenSolver<Matrix>(P, Eigen::EigenvaluesOnly).eigenvalues();
    return {true, std::sqrt(std::max(pev(pev.size() - 1), 0.0))};
}

NullControllability null_controllability_test(const Propagator& prop, const DualityOptions& opts) {
    return null_controllability_test(prop, ctrl_gramian_quadrature(prop, opts.rule), opts);
}

DualityReport exact_controllability_test(const Propagator& prop, const DualityOptions& opts) {
    const GramianResult W     = ctrl_gramian_quadrature(prop, opts.rule);
    const Coercivity    coer  = coercivity_check(W, opts.coercivity_tol);
    const auto          null  = null_controllability_test(prop, W, opts);
    return DualityReport{
        .controllable       = coer.coercive,
        .lambda_min_W       = W.lambda_min,
        .lambda_max_W       = W.lambda_max,
        .obs_constant_delta = observability_constant(W),
        .admissibility_M    = admissibility_constant(prop, opts.rule),
        .null_controllable  = null.feasible,
        .null_inclusion_c   = null.c,
    };
}

DualityReport exact_controllability_test(const LtvSystem& sys, const DualityOptions& opts,
                                         const PropagatorOptions& popts) {
    return exact_controllability_test(Propagator(sys, popts), opts);
}

}  // namespace ltv
