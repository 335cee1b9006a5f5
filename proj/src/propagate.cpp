#include "ltv/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ltv {

Matrix integrate_interval(const CoeffMatrixFn& A, double t0, double t1, const PropagatorOptions& opts) {
    if (opts.substeps < 1) throw DomainError("substeps must be >= 1");
    const int    n = A.rows();
    const double h = (t1 - t0) / opts.substeps;
    Matrix       Y = Matrix::Identity(n, n);

    for (int k = 0; k < opts.substeps; ++k) {
        const double t  = t0 + k * h;
        const double te = (k + 1 == opts.substeps) ? t1 : t + h;
        const Matrix A0 = A(t);
        const Matrix Am = A(t + 0.5 * h);
        if (opts.method == Integrator::Midpoint) {
            const Matrix half = Y - 0.5 * h * (A0 * Y);
            Y -= h * (Am * half);
            continue;
        }
        const Matrix A1 = A(te);
        const Matrix k1 = -A0 * Y;
        const Matrix k2 = -Am * (Y + 0.5 * h * k1);
        const Matrix k3 = -Am * (Y + 0.5 * h * k2);
        const Matrix k4 = -A1 * (Y + h * k3);
        Y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return Y;
}

Propagator::Propagator(LtvSystem sys, PropagatorOptions opts) : sys_(std::move(sys)), opts_(opts) {
    if (opts_.substeps < 1) throw DomainError("substeps must be >= 1");
    const TimeGrid& g = sys_.grid();
    const int       N = g.steps();
    const int       n = sys_.n();

    steps_.reserve(static_cast<std::size_t>(N));
    if (sys_.coeff_a().is_time_invariant() && g.is_uniform()) {
        // Autonomous on a uniform grid: every interval has the same transition.
        const Matrix Phi = integrate_interval(sys_.coeff_a(), 0.0, g[1], opts_);
        steps_.assign(static_cast<std::size_t>(N), Phi);
    } else {
        for (int i = 0; i < N; ++i) steps_.push_back(integrate_interval(sys_.coeff_a(), g[i], g[i + 1], opts_));
    }

    from_initial_.resize(static_cast<std::size_t>(N) + 1);
    from_initial_[0] = Matrix::Identity(n, n);
    for (int i = 0; i < N; ++i) from_initial_[i + 1] = steps_[i] * from_initial_[i];

    to_final_.resize(static_cast<std::size_t>(N) + 1);
    to_final_[N] = Matrix::Identity(n, n);
    for (int i = N - 1; i >= 0; --i) to_final_[i] = to_final_[i + 1] * steps_[i];
}

void Propagator::check_index(int i) const {
    if (i < 0 || i > steps()) throw DomainError("grid index " + std::to_string(i) + " outside [0, " + std::to_string(steps()) + "]");
}

Matrix Propagator::transition(int s_idx, int t_idx) const {
    check_index(s_idx);
    check_index(t_idx);
    if (s_idx > t_idx)
        throw DomainError("transition(" + std::to_string(s_idx) + ", " + std::to_string(t_idx) +
                          "): backward evolution is not defined");
    if (s_idx == t_idx) return Matrix::Identity(sys_.n(), sys_.n());
    if (t_idx == steps()) return to_final(s_idx);
    if (s_idx == 0) return from_initial(t_idx);
    Matrix U = Matrix::Identity(sys_.n(), sys_.n());
    for (int i = s_idx; i < t_idx; ++i) U = steps_[i] * U;
    return U;
}

Vector Propagator::propagate_state(const Vector& x0, int t_idx) const {
    check_index(t_idx);
    if (x0.size() != sys_.n()) throw DomainError("initial state has wrong dimension");
    return from_initial(t_idx) * x0;
}

Vector Propagator::propagate_state(const Vector& x0, const ControlSignal& u, int t_idx, Quadrature rule) const {
    check_index(t_idx);
    if (x0.size() != sys_.n()) throw DomainError("initial state has wrong dimension");
    if (!(u.grid() == grid())) throw DomainError("control signal grid differs from the propagator grid");
    if (u.dim() != sys_.m()) throw DomainError("control signal has wrong dimension");

    // Walk backwards from t_idx so that U(t, t_i) is built with one product per node.
    const auto w = quadrature_weights(grid(), rule, 0, t_idx);
    Vector     x = from_initial(t_idx) * x0;
    Matrix     U = Matrix::Identity(sys_.n(), sys_.n());
    for (int i = t_idx; i >= 0; --i) {
        if (i < t_idx) U = U * steps_[i];
        if (w[i] != 0.0) x += w[i] * (U * (sys_.B(grid()[i]) * u.values().col(i)));
    }
    return x;
}

Vector Propagator::adjoint_state(const Vector& z_tau, int t_idx) const {
    check_index(t_idx);
    if (z_tau.size() != sys_.n()) throw DomainError("final datum has wrong dimension");
    return transition(t_idx, steps()).transpose() * z_tau;
}

GrowthBound Propagator::growth_bound() const {
    const int N = steps();
    constexpr int kMaxNodes = 201;

    std::vector<int> nodes;
    if (N + 1 <= kMaxNodes) {
        for (int i = 0; i <= N; ++i) nodes.push_back(i);
    } else {
        for (int k = 0; k < kMaxNodes; ++k) nodes.push_back(static_cast<int>(std::llround(static_cast<double>(k) * N / (kMaxNodes - 1))));
    }
    const std::size_t K = nodes.size();

    std::vector<Matrix> blocks(K - 1);
    for (std::size_t k = 0; k + 1 < K; ++k) blocks[k] = transition(nodes[k], nodes[k + 1]);

    std::vector<double> dt, logn;
    for (std::size_t i = 0; i + 1 < K; ++i) {
        Matrix U = Matrix::Identity(sys_.n(), sys_.n());
        for (std::size_t j = i + 1; j < K; ++j) {
            U = blocks[j - 1] * U;
            const double s = Eigen::JacobiSVD<Matrix>(U).singularValues()(0);
            dt.push_back(grid()[nodes[j]] - grid()[nodes[i]]);
            logn.push_back(std::log(std::max(s, std::numeric_limits<double>::min())));
        }
    }

    const double n_pairs = static_cast<double>(dt.size());
    double mean_t = 0.0, mean_y = 0.0;
    for (std::size_t k = 0; k < dt.size(); ++k) {
        mean_t += dt[k];
        mean_y += logn[k];
    }
    mean_t /= n_pairs;
    mean_y /= n_pairs;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < dt.size(); ++k) {
        sxy += (dt[k] - mean_t) * (logn[k] - mean_y);
        sxx += (dt[k] - mean_t) * (dt[k] - mean_t);
    }
    const double omega = sxx > 0.0 ? sxy / sxx : 0.0;

    // U(t,t) = I contributes log M >= 0.
    double log_m = 0.0;
    for (std::size_t k = 0; k < dt.size(); ++k) log_m = std::max(log_m, logn[k] - omega * dt[k]);
    return {std::exp(log_m), omega};
}

}  // namespace ltv
