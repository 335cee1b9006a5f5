#pragma once

#include <limits>

#include "ltv/gramian.hpp"

namespace ltv {

struct DualityOptions {
    Quadrature rule           = Quadrature::Trapezoid;
    double     coercivity_tol = kDefaultCoercivityTol;  ///< relative eigenvalue cutoff for rank decisions
    double     range_tol      = 1e-8;                   ///< projection residual / column norm
};

/**
 * @brief Controllability verdicts and constants for one system on [0, tau].
 *
 * obs_constant_delta is the best delta in delta |z| <= |Psi^* z|_{L2}, i.e.
 * sqrt(lambda_min(W_tau)). null_inclusion_c is +inf when the range inclusion fails.
 */
struct DualityReport {
    bool   controllable;
    double lambda_min_W;
    double lambda_max_W;
    double obs_constant_delta;
    double admissibility_M;
    bool   null_controllable;
    double null_inclusion_c;
};

/// Psi_tau u = int_0^tau U(tau,s) B(s) u(s) ds by quadrature.
Vector input_map(const Propagator& prop, const ControlSignal& u, Quadrature rule = Quadrature::Trapezoid);

/// (Psi_tau^* z)(t_i) = B(t_i)^T U(tau,t_i)^T z.
ControlSignal input_map_adjoint(const Propagator& prop, const Vector& z);

/// |<Psi u, z> - <u, Psi^* z>_{L2}|.
double adjoint_identity_residual(const Propagator& prop, const ControlSignal& u, const Vector& z,
                                 Quadrature rule = Quadrature::Trapezoid);

/// |<x(tau), z_tau> - int_0^tau <u(s), B(s)^T z(s)> ds| with x(0) = 0, x(tau) from
/// propagate_state and z(s) from adjoint_state.
double key_identity_residual(const Propagator& prop, const ControlSignal& u, const Vector& z_tau,
                             Quadrature rule = Quadrature::Trapezoid);

/// Smallest M with int_s^tau |C(t) U(t,s) x|^2 dt <= M^2 |x|^2 for every grid node s.
double admissibility_constant(const Propagator& prop, Quadrature rule = Quadrature::Trapezoid);

struct NullControllability {
    bool   feasible;
    double c;  ///< +inf when infeasible
};

/// Range test Ran U(tau,0) in Ran W_tau^{1/2} and the constant c of
/// |U(tau,0)^T z| <= c |Psi^* z|_{L2}.
NullControllability null_controllability_test(const Propagator& prop, const DualityOptions& opts = {});
NullControllability null_controllability_test(const Propagator& prop, const GramianResult& W,
                                              const DualityOptions& opts = {});

DualityReport exact_controllability_test(const Propagator& prop, const DualityOptions& opts = {});
DualityReport exact_controllability_test(const LtvSystem& sys, const DualityOptions& opts = {},
                                         const PropagatorOptions& popts = {});

}  // namespace ltv
