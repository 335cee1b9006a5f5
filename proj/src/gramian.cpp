#include "ltv/gramian.hpp"

#include <algorithm>
#include <cmath>

namespace ltv {

GramianResult make_gramian_result(Matrix W, GramianKind kind, GramianMethod method) {
    W = 0.5 * (W + W.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(W, Eigen::EigenvaluesOnly);
    Vector ev = es.eigenvalues();
    return GramianResult{std::move(W), kind, method, ev, ev(0), ev(ev.size() - 1), std::nullopt};
}

GramianResult ctrl_gramian_quadrature(const Propagator& prop, Quadrature rule) {
    const auto& sys = prop.system();
    const auto& g   = prop.grid();
    const auto  w   = quadrature_weights(g, rule);
    Matrix      W   = Matrix::Zero(sys.n(), sys.n());
    for (int i = 0; i <= g.steps(); ++i) {
        const Matrix UB = prop.to_final(i) * sys.B(g[i]);
        W.noalias() += w[i] * (UB * UB.transpose());
    }
    return make_gramian_result(std::move(W), GramianKind::Controllability, GramianMethod::Quadrature);
}

GramianResult ctrl_gramian_lyapunov(const LtvSystem& sys, const PropagatorOptions& opts) {
    if (opts.substeps < 1) throw DomainError("substeps must be >= 1");
    const auto& g = sys.grid();
    const int   n = sys.n();

    auto rhs = [&](double t, const Matrix& W) -> Matrix {
        const Matrix A  = sys.A(t);
        const Matrix B  = sys.B(t);
        const Matrix AW = A * W;
        return -AW - AW.transpose() + B * B.transpose();
    };

    Matrix W = Matrix::Zero(n, n);
    for (int i = 0; i < g.steps(); ++i) {
        const double h = g.step_length(i) / opts.substeps;
        for (int k = 0; k < opts.substeps; ++k) {
            const double t  = g[i] + k * h;
            const double te = (k + 1 == opts.substeps) ? g[i + 1] : t + h;
            if (opts.method == Integrator::Midpoint) {
                W += h * rhs(t + 0.5 * h, W + 0.5 * h * rhs(t, W));
                continue;
            }
            const Matrix k1 = rhs(t, W);
            const Matrix k2 = rhs(t + 0.5 * h, W + 0.5 * h * k1);
            const Matrix k3 = rhs(t + 0.5 * h, W + 0.5 * h * k2);
            const Matrix k4 = rhs(te, W + h * k3);
            W += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return make_gramian_result(std::move(W), GramianKind::Controllability, GramianMethod::LyapunovOde);
}

GramianResult obs_gramian(const Propagator& prop, Quadrature rule) {
    const auto& sys = prop.system();
    const auto& g   = prop.grid();
    const auto  w   = quadrature_weights(g, rule);
    Matrix      Q   = Matrix::Zero(sys.n(), sys.n());
    for (int i = 0; i <= g.steps(); ++i) {
        const Matrix CU = sys.C(g[i]) * prop.from_initial(i);
        Q.noalias() += w[i] * (CU.transpose() * CU);
    }
    return make_gramian_result(std::move(Q), GramianKind::Observability, GramianMethod::Quadrature);
}

double cross_check(GramianResult& a, GramianResult& b) {
    if (a.W.rows() != b.W.rows()) throw DomainError("cross_check: Gramian sizes differ");
    const double r   = (a.W - b.W).norm();
    a.cross_residual = r;
    b.cross_residual = r;
    return r;
}

Coercivity coercivity_check(const GramianResult& g, double tol) {
    return {g.lambda_min > tol * g.lambda_max, g.lambda_min};
}

double observability_constant(const GramianResult& g) { return std::sqrt(std::max(g.lambda_min, 0.0)); }

}  // namespace ltv
