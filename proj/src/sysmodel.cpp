#include "ltv/sysmodel.hpp"

#include <algorithm>
#include <cmath>

namespace ltv {

namespace {

bool all_finite(const Matrix& M) { return M.allFinite(); }

// Slack for evaluation points produced by floating-point time stepping.
double time_slack(double tau) { return 1e-12 * std::max(1.0, tau); }

}  // namespace

TimeGrid TimeGrid::uniform(double tau, int steps) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw SpecError("tau", "horizon must be finite and > 0");
    if (steps < 2) throw SpecError("steps", "need at least 2 steps");
    std::vector<double> nodes(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) nodes[static_cast<std::size_t>(i)] = tau * i / steps;
    nodes.back() = tau;
    return TimeGrid(std::move(nodes));
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 3) throw SpecError("nodes", "need at least 3 nodes (N >= 2)");
    if (nodes.front() != 0.0) throw SpecError("nodes[0]", "grid must start at t = 0");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!std::isfinite(nodes[i])) throw SpecError("nodes[" + std::to_string(i) + "]", "non-finite node");
        if (i > 0 && !(nodes[i] > nodes[i - 1]))
            throw SpecError("nodes[" + std::to_string(i) + "]", "nodes must be strictly increasing");
    }
    return TimeGrid(std::move(nodes));
}

bool TimeGrid::is_uniform() const { return nodes_ == uniform(tau(), steps()).nodes_; }

int TimeGrid::interval_of(double t) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    int  i  = static_cast<int>(it - nodes_.begin()) - 1;
    return std::clamp(i, 0, steps() - 1);
}

std::vector<double> quadrature_weights(const TimeGrid& grid, Quadrature rule, int first, int last) {
    if (last < 0) last = grid.steps();
    if (first < 0 || first > last || last > grid.steps()) throw DomainError("quadrature_weights: bad node range");

    std::vector<double> w(static_cast<std::size_t>(grid.steps()) + 1, 0.0);
    const int intervals = last - first;
    if (intervals == 0) return w;

    if (rule == Quadrature::Trapezoid || intervals == 1) {
        for (int i = first; i < last; ++i) {
            const double h = grid.step_length(i);
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
        return w;
    }

    // Composite Simpson over interval pairs (non-uniform form).
    const int paired_end = (intervals % 2 == 0) ? last : last - 1;
    for (int i = first; i < paired_end; i += 2) {
        const double h0 = grid.step_length(i);
        const double h1 = grid.step_length(i + 1);
        const double s  = (h0 + h1) / 6.0;
        w[i] += s * (2.0 - h1 / h0);
        w[i + 1] += s * (h0 + h1) * (h0 + h1) / (h0 * h1);
        w[i + 2] += s * (2.0 - h0 / h1);
    }
    if (paired_end != last) {
        // Last interval: integrate the quadratic through t_{last-2}, t_{last-1}, t_last.
        const double h0 = grid.step_length(last - 2);
        const double h1 = grid.step_length(last - 1);
        w[last] += (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        w[last - 1] += (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        w[last - 2] -= h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    }
    return w;
}

CoeffMatrixFn CoeffMatrixFn::constant(Matrix value, double tau) {
    if (value.size() == 0) throw SpecError("", "empty coefficient matrix");
    if (!all_finite(value)) throw SpecError("data", "non-finite entry");
    return CoeffMatrixFn(Kind::Constant, {std::move(value)}, tau, TimeGrid::uniform(tau, 2));
}

CoeffMatrixFn CoeffMatrixFn::polynomial(std::vector<Matrix> coeffs, double tau) {
    if (coeffs.empty()) throw SpecError("data", "polynomial needs at least one coefficient");
    if (static_cast<int>(coeffs.size()) - 1 > kMaxPolyDegree)
        throw SpecError("data", "polynomial degree exceeds " + std::to_string(kMaxPolyDegree));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const std::string where = "data[" + std::to_string(k) + "]";
        if (coeffs[k].size() == 0) throw SpecError(where, "empty coefficient matrix");
        if (coeffs[k].rows() != coeffs[0].rows() || coeffs[k].cols() != coeffs[0].cols())
            throw SpecError(where, "coefficient shapes differ");
        if (!all_finite(coeffs[k])) throw SpecError(where, "non-finite entry");
    }
    return CoeffMatrixFn(Kind::Polynomial, std::move(coeffs), tau, TimeGrid::uniform(tau, 2));
}

CoeffMatrixFn CoeffMatrixFn::samples(TimeGrid grid, std::vector<Matrix> values) {
    if (static_cast<int>(values.size()) != grid.steps() + 1)
        throw SpecError("data", "expected " + std::to_string(grid.steps() + 1) + " samples, got " +
                                    std::to_string(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) {
        const std::string where = "data[" + std::to_string(k) + "]";
        if (values[k].size() == 0) throw SpecError(where, "empty sample matrix");
        if (values[k].rows() != values[0].rows() || values[k].cols() != values[0].cols())
            throw SpecError(where, "sample shapes differ");
        if (!all_finite(values[k])) throw SpecError(where, "non-finite entry");
    }
    const double tau = grid.tau();
    return CoeffMatrixFn(Kind::Samples, std::move(values), tau, std::move(grid));
}

bool CoeffMatrixFn::is_time_invariant() const {
    switch (kind_) {
        case Kind::Constant: return true;
        case Kind::Polynomial:
            return std::all_of(data_.begin() + 1, data_.end(), [](const Matrix& M) { return (M.array() == 0.0).all(); });
        case Kind::Samples:
            return std::all_of(data_.begin(), data_.end(), [&](const Matrix& M) { return M == data_.front(); });
    }
    return false;
}

Matrix CoeffMatrixFn::operator()(double t) const {
    const double slack = time_slack(tau_);
    if (!(t >= -slack && t <= tau_ + slack))
        throw DomainError("coefficient evaluated at t = " + std::to_string(t) + " outside [0, " + std::to_string(tau_) +
                          "]");
    t = std::clamp(t, 0.0, tau_);

    switch (kind_) {
        case Kind::Constant: return data_.front();
        case Kind::Polynomial: {
            // Horner
            Matrix acc = data_.back();
            for (auto it = data_.rbegin() + 1; it != data_.rend(); ++it) acc = acc * t + *it;
            return acc;
        }
        case Kind::Samples: {
            const int    i  = sample_grid_.interval_of(t);
            const double t0 = sample_grid_[i];
            const double th = (t - t0) / sample_grid_.step_length(i);
            return (1.0 - th) * data_[static_cast<std::size_t>(i)] + th * data_[static_cast<std::size_t>(i) + 1];
        }
    }
    return {};
}

Matrix eval_coeff(const CoeffMatrixFn& f, double t) { return f(t); }

LtvSystem::LtvSystem(CoeffMatrixFn A, CoeffMatrixFn B, CoeffMatrixFn C, TimeGrid grid)
    : a_(std::move(A)), b_(std::move(B)), c_(std::move(C)), grid_(std::move(grid)) {
    const int n = a_.rows();
    if (a_.cols() != n) throw SpecError("A", "must be square, got " + std::to_string(a_.rows()) + "x" + std::to_string(a_.cols()));
    if (n < 1 || n > kMaxStateDim) throw SpecError("n", "state dimension must be in [1, 64]");
    if (b_.rows() != n)
        throw SpecError("B", "expected " + std::to_string(n) + " rows, got " + std::to_string(b_.rows()));
    if (c_.cols() != n)
        throw SpecError("C", "expected " + std::to_string(n) + " columns, got " + std::to_string(c_.cols()));

    const double tol = 1e-12 * std::max(1.0, grid_.tau());
    auto check_horizon = [&](const CoeffMatrixFn& f, const char* name) {
        if (std::abs(f.horizon() - grid_.tau()) > tol)
            throw SpecError(name, "coefficient horizon " + std::to_string(f.horizon()) + " differs from tau " +
                                      std::to_string(grid_.tau()));
    };
    check_horizon(a_, "A");
    check_horizon(b_, "B");
    check_horizon(c_, "C");

    auto check_samples = [&](const CoeffMatrixFn& f, const char* name) {
        if (f.kind() == CoeffMatrixFn::Kind::Samples && !(f.sample_grid() == grid_))
            throw SpecError(name, "samples must be given on the system grid");
    };
    check_samples(a_, "A");
    check_samples(b_, "B");
    check_samples(c_, "C");
}

LtvSystem LtvSystem::with_grid(TimeGrid grid) const { return LtvSystem(a_, b_, c_, std::move(grid)); }

ControlSignal::ControlSignal(TimeGrid grid, Matrix values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.cols() != grid_.steps() + 1)
        throw DomainError("signal has " + std::to_string(values_.cols()) + " samples, grid needs " +
                          std::to_string(grid_.steps() + 1));
    if (values_.rows() < 1) throw DomainError("signal dimension must be >= 1");
    if (!values_.allFinite()) throw DomainError("signal has non-finite entries");
}

ControlSignal ControlSignal::zero(const TimeGrid& grid, int dim) {
    return ControlSignal(grid, Matrix::Zero(dim, grid.steps() + 1));
}

namespace {
void require_compatible(const ControlSignal& a, const ControlSignal& b) {
    if (!(a.grid() == b.grid())) throw DomainError("signals live on different grids");
    if (a.dim() != b.dim()) throw DomainError("signal dimensions differ");
}
}  // namespace

ControlSignal ControlSignal::operator+(const ControlSignal& other) const {
    require_compatible(*this, other);
    return ControlSignal(grid_, values_ + other.values_);
}

ControlSignal ControlSignal::operator-(const ControlSignal& other) const {
    require_compatible(*this, other);
    return ControlSignal(grid_, values_ - other.values_);
}

ControlSignal ControlSignal::operator*(double alpha) const { return ControlSignal(grid_, values_ * alpha); }

double l2_inner(const ControlSignal& a, const ControlSignal& b, Quadrature rule) {
    require_compatible(a, b);
    const auto w   = quadrature_weights(a.grid(), rule);
    double     sum = 0.0;
    for (int i = 0; i <= a.grid().steps(); ++i) sum += w[i] * a.values().col(i).dot(b.values().col(i));
    return sum;
}

double l2_norm(const ControlSignal& s, Quadrature rule) {
    const auto w   = quadrature_weights(s.grid(), rule);
    double     sum = 0.0;
    for (int i = 0; i <= s.grid().steps(); ++i) sum += w[i] * s.values().col(i).squaredNorm();
    // Simpson weights can be negative on strongly non-uniform grids.
    return std::sqrt(std::max(sum, 0.0));
}

}  // namespace ltv
