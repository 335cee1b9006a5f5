#include "ltv/synth.hpp"

#include <cmath>
#include <limits>

namespace ltv {

namespace {

void require_state(const Propagator& prop, const Vector& x, const char* what) {
    if (x.size() != prop.system().n()) throw DomainError(std::string(what) + " has wrong dimension");
}

SynthesisResult finish(const Propagator& prop, const Vector& x0, const Vector& x_tau, const Vector& d, const Vector& eta,
                       double condition, Quadrature rule) {
    ControlSignal u        = input_map_adjoint(prop, eta);
    const double  residual = verify_steering(prop, u, x0, x_tau, rule);
    const double  norm     = l2_norm(u, rule);
    return SynthesisResult{std::move(u), residual, norm * norm, d.dot(eta), condition};
}

}  // namespace

double verify_steering(const Propagator& prop, const ControlSignal& u, const Vector& x0, const Vector& x_target,
                       Quadrature rule) {
    require_state(prop, x_target, "target state");
    return (prop.propagate_state(x0, u, prop.steps(), rule) - x_target).norm();
}

SynthesisResult min_norm_control(const Propagator& prop, const Vector& x0, const Vector& x_tau, const SynthOptions& opts) {
    require_state(prop, x0, "initial state");
    require_state(prop, x_tau, "target state");

    const GramianResult W = ctrl_gramian_quadrature(prop, opts.rule);
    if (!coercivity_check(W, opts.coercivity_tol).coercive) throw NotControllable(W.lambda_min, W.lambda_max);

    const double condition = W.lambda_max / W.lambda_min;
    const Vector d         = x_tau - prop.to_final(0) * x0;
    Eigen::LLT<Matrix> llt(W.W);
    if (llt.info() != Eigen::Success) throw SolveError(condition);
    const Vector eta = llt.solve(d);
    if (!eta.allFinite()) throw SolveError(condition);
    return finish(prop, x0, x_tau, d, eta, condition, opts.rule);
}

SynthesisResult null_control(const Propagator& prop, const Vector& x0, const SynthOptions& opts) {
    require_state(prop, x0, "initial state");
    const int n = prop.system().n();

    const GramianResult  W    = ctrl_gramian_quadrature(prop, opts.rule);
    const DualityOptions dopt{opts.rule, opts.coercivity_tol, opts.range_tol};
    const auto           test = null_controllability_test(prop, W, dopt);
    if (!test.feasible)
        throw NotNullControllable("Ran U(tau,0) is not contained in Ran W_tau (lambda_max = " +
                                  std::to_string(W.lambda_max) + ")");

    const Vector zero = Vector::Zero(n);
    if (coercivity_check(W, opts.coercivity_tol).coercive) return min_norm_control(prop, x0, zero, opts);

    // Pseudo-inverse restricted to Ran W_tau.
    Eigen::SelfAdjointEigenSolver<Matrix> es(W.W);
    const Vector d   = -(prop.to_final(0) * x0);
    Vector       eta = Vector::Zero(n);
    double       lo  = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        const double l = es.eigenvalues()(k);
        if (l > opts.coercivity_tol * W.lambda_max) {
            const Vector v = es.eigenvectors().col(k);
            eta += (v.dot(d) / l) * v;
            lo = std::min(lo, l);
        }
    }
    return finish(prop, x0, zero, d, eta, W.lambda_max / lo, opts.rule);
}

}  // namespace ltv
