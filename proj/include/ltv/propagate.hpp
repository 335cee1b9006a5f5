#pragma once

#include <vector>

#include "ltv/sysmodel.hpp"

namespace ltv {

enum class Integrator { RK4, Midpoint };

struct PropagatorOptions {
    Integrator method   = Integrator::RK4;
    int        substeps = 4;  ///< integrator steps per grid interval
};

struct GrowthBound {
    double M;      ///< >= 1
    double omega;  ///< negative certifies exponential decay
};

/**
 * @brief Discretized evolution family U(t, s) of x' = -A(t) x.
 *
 * Convention: d/dt U(t,s) = -A(t) U(t,s) and d/ds U(t,s) = U(t,s) A(s), so that
 * z(t) = U(tau,t)^T z_tau solves z' = A(t)^T z backward from z(tau) = z_tau.
 *
 * Only the one-interval transitions Phi_i = U(t_{i+1}, t_i) are integrated;
 * every other transition is a product of them, so the cocycle law holds up to
 * rounding. U(t_i, 0) and U(tau, t_i) are cached at construction.
 */
class Propagator {
   public:
    explicit Propagator(LtvSystem sys, PropagatorOptions opts = {});

    const LtvSystem&         system() const { return sys_; }
    const TimeGrid&          grid() const { return sys_.grid(); }
    int                      steps() const { return sys_.grid().steps(); }
    const PropagatorOptions& options() const { return opts_; }

    /// Phi_i = U(t_{i+1}, t_i).
    const Matrix& step(int i) const { return steps_[static_cast<std::size_t>(i)]; }
    /// U(t_i, 0).
    const Matrix& from_initial(int i) const { return from_initial_[static_cast<std::size_t>(i)]; }
    /// U(tau, t_i).
    const Matrix& to_final(int i) const { return to_final_[static_cast<std::size_t>(i)]; }

    /// U(t_{t_idx}, t_{s_idx}) = Phi_{t_idx-1} ... Phi_{s_idx}. Requires s_idx <= t_idx.
    Matrix transition(int s_idx, int t_idx) const;

    /// U(t,0) x0.
    Vector propagate_state(const Vector& x0, int t_idx) const;
    /// U(t,0) x0 + int_0^t U(t,s) B(s) u(s) ds, the integral by quadrature on the grid nodes up to t_idx.
    Vector propagate_state(const Vector& x0, const ControlSignal& u, int t_idx,
                           Quadrature rule = Quadrature::Trapezoid) const;

    /// z(t_idx) = U(tau, t_idx)^T z_tau, the solution of z' = A(t)^T z with z(tau) = z_tau.
    Vector adjoint_state(const Vector& z_tau, int t_idx) const;

    /// Least-squares fit of log|U(t_j,t_i)|_2 ~ log M + omega (t_j - t_i) over node pairs, with M raised
    /// until the bound holds at every pair. Grids with more than 200 steps are thinned to 201 nodes.
    GrowthBound growth_bound() const;

   private:
    void check_index(int i) const;

    LtvSystem           sys_;
    PropagatorOptions   opts_;
    std::vector<Matrix> steps_;
    std::vector<Matrix> from_initial_;
    std::vector<Matrix> to_final_;
};

/// Integrates Y' = -A(t) Y from Y(t0) = I to t1 with the given fixed-step scheme.
Matrix integrate_interval(const CoeffMatrixFn& A, double t0, double t1, const PropagatorOptions& opts);

}  // namespace ltv
