#pragma once

#include "ltv/duality.hpp"

namespace ltv {

struct SynthOptions {
    Quadrature rule           = Quadrature::Trapezoid;
    double     coercivity_tol = kDefaultCoercivityTol;
    double     range_tol      = 1e-8;
};

/**
 * @brief A steering control together with its verification numbers.
 *
 * cost = |u|_{L2}^2 and gramian_cost = <W^+ d, d> with d = x_tau - U(tau,0) x0
 * (W^+ is the inverse, or the pseudo-inverse on Ran W for singular null control).
 */
struct SynthesisResult {
    ControlSignal control;
    double        target_residual;
    double        cost;
    double        gramian_cost;
    double        condition;  ///< lambda_max / lambda_min over the eigenvalues used
};

/// u(s) = B(s)^T U(tau,s)^T W_tau^{-1} (x_tau - U(tau,0) x0). Throws NotControllable
/// when W_tau is not coercive and SolveError when the Cholesky solve fails.
SynthesisResult min_norm_control(const Propagator& prop, const Vector& x0, const Vector& x_tau,
                                 const SynthOptions& opts = {});

/// Minimum-norm control to x(tau) = 0. Falls back to the pseudo-inverse on Ran W_tau
/// when W_tau is singular but the range inclusion holds; throws NotNullControllable otherwise.
SynthesisResult null_control(const Propagator& prop, const Vector& x0, const SynthOptions& opts = {});

/// |x(tau) - x_target| for x(0) = x0 driven by u.
double verify_steering(const Propagator& prop, const ControlSignal& u, const Vector& x0, const Vector& x_target,
                       Quadrature rule = Quadrature::Trapezoid);

}  // namespace ltv
