#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ltv/duality.hpp"

namespace ltv {

/// Re(lambda) > 0 for the non-autonomous functional, Re(s) < 0 for Russell-Weiss.
enum class HalfPlane { RightOpen, LeftOpen };

/**
 * @brief Spectral points and unit test vectors for a Hautus sweep.
 */
class HautusGrid {
   public:
    /// Throws DomainError if a point lies outside the half-plane or a vector is not unit (1e-12).
    HautusGrid(std::vector<Complex> lambdas, std::vector<CVector> test_vectors, HalfPlane side = HalfPlane::RightOpen);

    /// Re(lambda) log-spaced over [re_min, re_max] (re_count points) times each imaginary part,
    /// plus vector_count unit vectors in C^n drawn from Lcg64(seed).
    static HautusGrid make(int n, double re_min, double re_max, int re_count, const std::vector<double>& im_parts,
                           int vector_count, std::uint64_t seed);
    /// Re in [0.1, 10] (7 points), Im in {0, +-1, +-10}.
    static HautusGrid default_grid(int n, int vector_count, std::uint64_t seed);

    const std::vector<Complex>& lambdas() const { return lambdas_; }
    const std::vector<CVector>& test_vectors() const { return vectors_; }
    HalfPlane                   side() const { return side_; }

   private:
    std::vector<Complex> lambdas_;
    std::vector<CVector> vectors_;
    HalfPlane            side_;
};

struct HautusReport {
    Matrix  margins;  ///< row = lambda index, column = test vector index
    double  min_margin;
    Complex witness_lambda;
    int     witness_lambda_index;
    int     witness_vector_index;
    double  delta;  ///< exact-observability constant used
    double  M;      ///< admissibility constant used
    bool    time_varying_c;  ///< boundary term used C(0)
};

struct HautusOptions {
    Quadrature rule    = Quadrature::Trapezoid;
    int        threads = 1;
};

// -- Russell-Weiss (frozen generator G) --------------------------------------

/// |(sI - G)x|^2 + |Re s| |Cx|^2 - m^2 |Re s|^2 |x|^2. Requires Re s < 0.
double russell_weiss_margin(const Matrix& G, const Matrix& C, Complex s, const CVector& x, double m);

struct RussellWeissMin {
    double  margin;
    CVector witness;  ///< unit minimizer
};

/// lambda_min((sI-G)^*(sI-G) + |Re s| C^T C) - m^2 |Re s|^2 with its eigenvector.
RussellWeissMin russell_weiss_min_margin(const Matrix& G, const Matrix& C, Complex s, double m);

/// Largest m (bisected to the given number of significant digits) for which the
/// minimum margin is >= 0 at every s. Returns the feasible end of the bracket.
double bisect_russell_weiss_m(const Matrix& G, const Matrix& C, std::span<const Complex> s_values, int digits = 4);

// -- Non-autonomous functional -----------------------------------------------

/// int_0^tau |(lambda - A(s)) x| e^{-Re(lambda) s} ds, i.e. |(lambda + G(s))x| with G = -A.
/// The norm is interpolated linearly between grid nodes and integrated exactly
/// against the exponential weight.
double hautus_integral(const Propagator& prop, Complex lambda, const CVector& x);

/// |C(0)x| / sqrt(2 Re lambda) + M * hautus_integral - delta |x|. Requires Re lambda > 0.
double nonautonomous_hautus_margin(const Propagator& prop, Complex lambda, const CVector& x, double delta, double M);

/// Margins over the grid with delta = sqrt(lambda_min(Q_tau)) and M = admissibility_constant().
HautusReport hautus_sweep(const Propagator& prop, const HautusGrid& grid, const HautusOptions& opts = {});

/// Unit eigenvectors of A(t) at `count` evenly spaced grid times (for use as Hautus test vectors).
std::vector<CVector> eigenvector_test_vectors(const LtvSystem& sys, int count);

// -- Frozen-parameter comparison ---------------------------------------------

/// sqrt(lambda_min(int_0^tau e^{-A(s0)^T t} C(s0)^T C(s0) e^{-A(s0) t} dt)) on the system grid.
double frozen_observability_constant(const LtvSystem& sys, double s0, const PropagatorOptions& popts = {},
                                     Quadrature rule = Quadrature::Trapezoid);

struct FrozenReport {
    double                                 inf_frozen;
    double                                 delta_ltv;
    std::vector<std::pair<double, double>> samples;  ///< (s, m(s))
};

/// m(s) at every grid node (or `max_samples` evenly spaced nodes when > 0) next to
/// delta of the time-varying system. Observational only.
FrozenReport frozen_vs_ltv_report(const Propagator& prop, int max_samples = 0, Quadrature rule = Quadrature::Trapezoid);

// -- Proof devices -----------------------------------------------------------

/// Given samples (s, |f(s)x|) on [a, b] whose trapezoid integral is >= delta * x_norm,
/// returns the sample time of the largest value; that value is >= delta / (b - a) * x_norm.
double find_witness_time(std::span<const std::pair<double, double>> samples, double a, double b, double delta,
                         double x_norm);

/// (1/sigma) int_0^sigma f - int_0^sigma t^{-2} int_0^t (f(t) - f(s)) ds dt for samples of f on
/// the uniform grid over [0, sigma] (at least 5 samples).
double averaging_identity_rhs(std::span<const double> f_samples, double sigma);

/// |f(0) - averaging_identity_rhs(f, sigma)|.
double averaging_identity_residual(std::span<const double> f_samples, double sigma);

}  // namespace ltv
