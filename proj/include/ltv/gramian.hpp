#pragma once

#include <optional>

#include "ltv/propagate.hpp"

namespace ltv {

inline constexpr double kDefaultCoercivityTol = 1e-10;

enum class GramianKind { Controllability, Observability };
enum class GramianMethod { Quadrature, LyapunovOde };

struct GramianResult {
    Matrix                W;            ///< symmetrized
    GramianKind           kind;
    GramianMethod         method;
    Vector                eigenvalues;  ///< ascending
    double                lambda_min;
    double                lambda_max;
    std::optional<double> cross_residual;  ///< |W - W_other|_F when both methods ran
};

/// Symmetrizes W and attaches its spectrum.
GramianResult make_gramian_result(Matrix W, GramianKind kind, GramianMethod method);

/// W_tau = sum_i w_i U(tau,t_i) B(t_i) B(t_i)^T U(tau,t_i)^T.
GramianResult ctrl_gramian_quadrature(const Propagator& prop, Quadrature rule = Quadrature::Trapezoid);

/// W(tau) from W' = -A W - W A^T + B B^T, W(0) = 0, integrated with the same
/// fixed-step scheme and substep count as the propagator.
GramianResult ctrl_gramian_lyapunov(const LtvSystem& sys, const PropagatorOptions& opts = {});

/// Q_tau = sum_i w_i U(t_i,0)^T C(t_i)^T C(t_i) U(t_i,0). sqrt(lambda_min) is the
/// exact-observability constant of x -> C U(.,0) x on [0, tau].
GramianResult obs_gramian(const Propagator& prop, Quadrature rule = Quadrature::Trapezoid);

/// Sets cross_residual on both results and returns it.
double cross_check(GramianResult& a, GramianResult& b);

struct Coercivity {
    bool   coercive;
    double lambda_min;
};

/// coercive iff lambda_min > tol * lambda_max.
Coercivity coercivity_check(const GramianResult& g, double tol = kDefaultCoercivityTol);

/// sqrt(max(lambda_min, 0)).
double observability_constant(const GramianResult& g);

}  // namespace ltv
