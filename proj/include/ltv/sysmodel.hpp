#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ltv/errors.hpp"

namespace ltv {

using Matrix  = Eigen::MatrixXd;
using Vector  = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr int kMaxStateDim   = 64;
inline constexpr int kMaxPolyDegree = 8;

/**
 * @brief Ordered sample times 0 = t_0 < t_1 < ... < t_N = tau, N >= 2.
 */
class TimeGrid {
   public:
    static TimeGrid uniform(double tau, int steps);
    static TimeGrid from_nodes(std::vector<double> nodes);

    double tau() const { return nodes_.back(); }
    int    steps() const { return static_cast<int>(nodes_.size()) - 1; }
    double operator[](int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    double step_length(int i) const { return (*this)[i + 1] - (*this)[i]; }

    const std::vector<double>& nodes() const { return nodes_; }

    /// True when the grid was built by uniform() or its nodes match it bit for bit.
    bool is_uniform() const;

    /// Index i of the interval [t_i, t_{i+1}] containing t (clamped to [0, N-1]).
    int interval_of(double t) const;

    bool operator==(const TimeGrid&) const = default;

   private:
    explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {}
    std::vector<double> nodes_;
};

enum class Quadrature { Trapezoid, Simpson };

/// Quadrature weights over nodes first..last of the grid (last = -1 means N), returned
/// as a full N+1 vector that is zero outside the range.
/// Simpson uses the non-uniform composite rule; with an odd interval count the
/// last interval is integrated by the quadratic through the last three nodes.
/// A single interval always falls back to the trapezoid rule.
std::vector<double> quadrature_weights(const TimeGrid& grid, Quadrature rule, int first = 0, int last = -1);

/**
 * @brief Real matrix-valued coefficient function on [0, tau].
 *
 * Three representations: a constant matrix, a matrix polynomial
 * sum_k M_k t^k of degree <= 8, or piecewise-linear samples on a grid.
 */
class CoeffMatrixFn {
   public:
    enum class Kind { Constant, Polynomial, Samples };

    static CoeffMatrixFn constant(Matrix value, double tau);
    static CoeffMatrixFn polynomial(std::vector<Matrix> coeffs, double tau);
    static CoeffMatrixFn samples(TimeGrid grid, std::vector<Matrix> values);

    Kind   kind() const { return kind_; }
    int    rows() const { return static_cast<int>(data_.front().rows()); }
    int    cols() const { return static_cast<int>(data_.front().cols()); }
    double horizon() const { return tau_; }

    /// Constant value, polynomial coefficients M_0..M_d, or per-node samples.
    const std::vector<Matrix>& data() const { return data_; }
    /// Only meaningful for Kind::Samples.
    const TimeGrid& sample_grid() const { return sample_grid_; }

    /// Independent of t (constant kind, degree-0 polynomial, or equal samples).
    bool is_time_invariant() const;

    Matrix operator()(double t) const;

   private:
    CoeffMatrixFn(Kind kind, std::vector<Matrix> data, double tau, TimeGrid grid)
        : kind_(kind), data_(std::move(data)), tau_(tau), sample_grid_(std::move(grid)) {}

    Kind                kind_;
    std::vector<Matrix> data_;
    double              tau_;
    TimeGrid            sample_grid_;
};

/// Evaluates f at t. Throws DomainError for t outside [0, tau].
Matrix eval_coeff(const CoeffMatrixFn& f, double t);

/**
 * @brief Validated system x' + A(t)x = B(t)u, y = C(t)x on a time grid.
 */
class LtvSystem {
   public:
    /// Throws SpecError naming "A", "B", "C" or "grid" when shapes or horizons disagree.
    LtvSystem(CoeffMatrixFn A, CoeffMatrixFn B, CoeffMatrixFn C, TimeGrid grid);

    int n() const { return a_.rows(); }
    int m() const { return b_.cols(); }
    int p() const { return c_.rows(); }
    double tau() const { return grid_.tau(); }

    const CoeffMatrixFn& coeff_a() const { return a_; }
    const CoeffMatrixFn& coeff_b() const { return b_; }
    const CoeffMatrixFn& coeff_c() const { return c_; }
    const TimeGrid&      grid() const { return grid_; }

    Matrix A(double t) const { return a_(t); }
    Matrix B(double t) const { return b_(t); }
    Matrix C(double t) const { return c_(t); }

    /// Same coefficients on a different grid with the same horizon.
    LtvSystem with_grid(TimeGrid grid) const;

   private:
    CoeffMatrixFn a_, b_, c_;
    TimeGrid      grid_;
};

/**
 * @brief Vector-valued signal sampled at every node of a grid.
 *
 * Used for inputs u(.), outputs y(.) and adjoint outputs B(t)^T z(t).
 * Column i holds the value at t_i.
 */
class ControlSignal {
   public:
    ControlSignal(TimeGrid grid, Matrix values);

    static ControlSignal zero(const TimeGrid& grid, int dim);

    template <class F>
    static ControlSignal sample(const TimeGrid& grid, int dim, F&& f) {
        Matrix values(dim, grid.steps() + 1);
        for (int i = 0; i <= grid.steps(); ++i) values.col(i) = f(grid[i]);
        return ControlSignal(grid, std::move(values));
    }

    const TimeGrid& grid() const { return grid_; }
    int             dim() const { return static_cast<int>(values_.rows()); }
    const Matrix&   values() const { return values_; }
    Vector          at(int i) const { return values_.col(i); }

    ControlSignal operator+(const ControlSignal& other) const;
    ControlSignal operator-(const ControlSignal& other) const;
    ControlSignal operator*(double alpha) const;

   private:
    TimeGrid grid_;
    Matrix   values_;
};

/// L2(0, tau) norm of s by quadrature of |s(t)|^2.
double l2_norm(const ControlSignal& s, Quadrature rule = Quadrature::Trapezoid);

/// L2(0, tau) inner product by the same quadrature. Signals must share grid and dimension.
double l2_inner(const ControlSignal& a, const ControlSignal& b, Quadrature rule = Quadrature::Trapezoid);

/// Parses the JSON system document {"n","m","p","tau","steps","A","B","C"[,"nodes"]}.
LtvSystem parse_system(std::string_view spec_text);

/// Writes a document that parse_system() reads back to bit-identical coefficients.
std::string serialize_system(const LtvSystem& sys);

}  // namespace ltv
