#include "ltv/hautus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "ltv/random.hpp"

namespace ltv {

namespace {

// phi1(x) = (1 - e^{-x}) / x and phi2(x) = (1 - e^{-x}(1 + x)) / x^2.
double phi1(double x) { return x < 1e-8 ? 1.0 - 0.5 * x : -std::expm1(-x) / x; }

double phi2(double x) {
    if (x < 0.1) {
        // sum_k (-x)^k / (k! (k + 2))
        double term = 1.0, sum = 0.0;
        for (int k = 0; k <= 12; ++k) {
            sum += term / (k + 2);
            term *= -x / (k + 1);
        }
        return sum;
    }
    return (-std::expm1(-x) - x * std::exp(-x)) / (x * x);
}

// Cumulative integral of uniformly sampled data, each interval integrated by the
// cubic through four neighbouring samples.
std::vector<double> cumulative_cubic(std::span<const double> f, double h) {
    const std::size_t N = f.size() - 1;
    std::vector<double> F(N + 1, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
        double piece;
        if (k == 0) {
            piece = (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]) / 24.0;
        } else if (k + 1 == N) {
            piece = (f[N - 3] - 5 * f[N - 2] + 19 * f[N - 1] + 9 * f[N]) / 24.0;
        } else {
            piece = (-f[k - 1] + 13 * f[k] + 13 * f[k + 1] - f[k + 2]) / 24.0;
        }
        F[k + 1] = F[k] + h * piece;
    }
    return F;
}

void require_left(Complex s) {
    if (!(s.real() < 0.0)) throw DomainError("Russell-Weiss test needs Re s < 0");
}

}  // namespace

HautusGrid::HautusGrid(std::vector<Complex> lambdas, std::vector<CVector> test_vectors, HalfPlane side)
    : lambdas_(std::move(lambdas)), vectors_(std::move(test_vectors)), side_(side) {
    for (const auto& l : lambdas_) {
        const bool ok = side_ == HalfPlane::RightOpen ? l.real() > 0.0 : l.real() < 0.0;
        if (!ok || !std::isfinite(l.real()) || !std::isfinite(l.imag()))
            throw DomainError("spectral point outside the declared open half-plane");
    }
    for (const auto& v : vectors_) {
        if (v.size() > 0 && v.size() != vectors_.front().size()) throw DomainError("test vectors differ in length");
        if (std::abs(v.norm() - 1.0) > 1e-12) throw DomainError("test vectors must have unit norm");
    }
}

HautusGrid HautusGrid::make(int n, double re_min, double re_max, int re_count, const std::vector<double>& im_parts,
                            int vector_count, std::uint64_t seed) {
    if (!(re_min > 0.0) || !(re_max >= re_min) || re_count < 1) throw DomainError("bad real-part range");
    std::vector<Complex> lambdas;
    for (int k = 0; k < re_count; ++k) {
        const double re = re_count == 1 ? re_min : re_min * std::pow(re_max / re_min, static_cast<double>(k) / (re_count - 1));
        for (double im : im_parts) lambdas.emplace_back(re, im);
    }
    Lcg64                rng(seed);
    std::vector<CVector> vectors;
    for (int k = 0; k < vector_count; ++k) vectors.push_back(rng.unit_cvector(n));
    return HautusGrid(std::move(lambdas), std::move(vectors), HalfPlane::RightOpen);
}

HautusGrid HautusGrid::default_grid(int n, int vector_count, std::uint64_t seed) {
    return make(n, 0.1, 10.0, 7, {0.0, 1.0, -1.0, 10.0, -10.0}, vector_count, seed);
}

double russell_weiss_margin(const Matrix& G, const Matrix& C, Complex s, const CVector& x, double m) {
    require_left(s);
    const double  re = std::abs(s.real());
    const CVector r  = s * x - G.cast<Complex>() * x;
    const CVector y  = C.cast<Complex>() * x;
    return r.squaredNorm() + re * y.squaredNorm() - m * m * re * re * x.squaredNorm();
}

RussellWeissMin russell_weiss_min_margin(const Matrix& G, const Matrix& C, Complex s, double m) {
    require_left(s);
    const int     n  = static_cast<int>(G.rows());
    const double  re = std::abs(s.real());
    const CMatrix K  = s * CMatrix::Identity(n, n) - G.cast<Complex>();
    CMatrix       H  = K.adjoint() * K + re * (C.transpose() * C).cast<Complex>();
    H                = 0.5 * (H + H.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    return {es.eigenvalues()(0) - m * m * re * re, es.eigenvectors().col(0)};
}

double bisect_russell_weiss_m(const Matrix& G, const Matrix& C, std::span<const Complex> s_values, int digits) {
    // The margin is decreasing in m, so only lambda_min at m = 0 matters.
    std::vector<std::pair<double, double>> base;
    for (Complex s : s_values) base.emplace_back(russell_weiss_min_margin(G, C, s, 0.0).margin, std::abs(s.real()));
    auto feasible = [&](double m) {
        return std::all_of(base.begin(), base.end(), [&](const auto& b) { return b.first - m * m * b.second * b.second >= 0.0; });
    };

    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 200 && feasible(hi); ++k) {
        lo = hi;
        hi *= 2.0;
    }
    const double rel = std::pow(10.0, -digits);
    for (int k = 0; k < 400 && hi - lo > rel * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

double hautus_integral(const Propagator& prop, Complex lambda, const CVector& x) {
    if (!(lambda.real() > 0.0)) throw DomainError("Hautus functional needs Re lambda > 0");
    const auto& sys = prop.system();
    const auto& g   = prop.grid();
    if (x.size() != sys.n()) throw DomainError("test vector has wrong dimension");

    const double r = lambda.real();
    std::vector<double> norms(static_cast<std::size_t>(g.steps()) + 1);
    for (int i = 0; i <= g.steps(); ++i) norms[i] = (lambda * x - sys.A(g[i]).cast<Complex>() * x).norm();

    double sum = 0.0;
    for (int i = 0; i < g.steps(); ++i) {
        const double h     = g.step_length(i);
        const double decay = std::exp(-r * g[i]);
        const double e0    = decay * h * phi1(r * h);  // int e^{-rs}
        const double e1    = decay * h * phi2(r * h);  // int (s - t_i)/h e^{-rs}
        sum += (e0 - e1) * norms[i] + e1 * norms[i + 1];
    }
    return sum;
}

double nonautonomous_hautus_margin(const Propagator& prop, Complex lambda, const CVector& x, double delta, double M) {
    const double integral = hautus_integral(prop, lambda, x);
    const double cx       = (prop.system().C(0.0).cast<Complex>() * x).norm();
    return cx / std::sqrt(2.0 * lambda.real()) + M * integral - delta * x.norm();
}

HautusReport hautus_sweep(const Propagator& prop, const HautusGrid& grid, const HautusOptions& opts) {
    if (grid.side() != HalfPlane::RightOpen) throw DomainError("hautus_sweep needs a right half-plane grid");
    const double delta = observability_constant(obs_gramian(prop, opts.rule));
    const double M     = admissibility_constant(prop, opts.rule);

    const auto& lambdas = grid.lambdas();
    const auto& vectors = grid.test_vectors();
    const int   L       = static_cast<int>(lambdas.size());
    const int   V       = static_cast<int>(vectors.size());
    Matrix      margins(L, V);

    auto work = [&](int begin, int end) {
        for (int l = begin; l < end; ++l)
            for (int v = 0; v < V; ++v) margins(l, v) = nonautonomous_hautus_margin(prop, lambdas[l], vectors[v], delta, M);
    };
    const int threads = std::clamp(opts.threads, 1, std::max(L, 1));
    if (threads == 1) {
        work(0, L);
    } else {
        std::vector<std::jthread> pool;
        const int chunk = (L + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, std::min(L, t * chunk), std::min(L, (t + 1) * chunk));
    }

    HautusReport report{margins, std::numeric_limits<double>::infinity(), Complex{}, -1, -1, delta, M,
                        !prop.system().coeff_c().is_time_invariant()};
    for (int l = 0; l < L; ++l)
        for (int v = 0; v < V; ++v)
            if (margins(l, v) < report.min_margin) {
                report.min_margin           = margins(l, v);
                report.witness_lambda       = lambdas[l];
                report.witness_lambda_index = l;
                report.witness_vector_index = v;
            }
    return report;
}

std::vector<CVector> eigenvector_test_vectors(const LtvSystem& sys, int count) {
    std::vector<CVector> out;
    const auto&          g = sys.grid();
    for (int k = 0; k < count; ++k) {
        const int idx = count == 1 ? 0 : static_cast<int>(std::llround(static_cast<double>(k) * g.steps() / (count - 1)));
        Eigen::EigenSolver<Matrix> es(sys.A(g[idx]));
        for (int j = 0; j < sys.n(); ++j) {
            CVector v = es.eigenvectors().col(j);
            if (const double r = v.norm(); r > 0.0) out.push_back(v / r);
        }
    }
    return out;
}

double frozen_observability_constant(const LtvSystem& sys, double s0, const PropagatorOptions& popts, Quadrature rule) {
    if (!(s0 >= 0.0 && s0 <= sys.tau())) throw DomainError("frozen time outside [0, tau]");
    const double tau = sys.tau();
    LtvSystem    frozen(CoeffMatrixFn::constant(sys.A(s0), tau), CoeffMatrixFn::constant(sys.B(s0), tau),
                        CoeffMatrixFn::constant(sys.C(s0), tau), sys.grid());
    return observability_constant(obs_gramian(Propagator(std::move(frozen), popts), rule));
}

FrozenReport frozen_vs_ltv_report(const Propagator& prop, int max_samples, Quadrature rule) {
    const auto& sys = prop.system();
    const auto& g   = sys.grid();
    const int   N   = g.steps();

    std::vector<int> nodes;
    if (max_samples <= 0 || max_samples >= N + 1) {
        for (int i = 0; i <= N; ++i) nodes.push_back(i);
    } else if (max_samples == 1) {
        nodes.push_back(0);
    } else {
        for (int k = 0; k < max_samples; ++k)
            nodes.push_back(static_cast<int>(std::llround(static_cast<double>(k) * N / (max_samples - 1))));
    }

    FrozenReport report{std::numeric_limits<double>::infinity(), observability_constant(obs_gramian(prop, rule)), {}};
    for (int i : nodes) {
        const double m = frozen_observability_constant(sys, g[i], prop.options(), rule);
        report.samples.emplace_back(g[i], m);
        report.inf_frozen = std::min(report.inf_frozen, m);
    }
    return report;
}

double find_witness_time(std::span<const std::pair<double, double>> samples, double a, double b, double delta,
                         double x_norm) {
    if (samples.empty()) throw DomainError("find_witness_time: no samples");
    if (!(b > a)) throw DomainError("find_witness_time: need a < b");
    double integral = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto [s, v] = samples[k];
        if (s < a || s > b) throw DomainError("find_witness_time: sample time outside [a, b]");
        if (k > 0) {
            if (!(s > samples[k - 1].first)) throw DomainError("find_witness_time: sample times must increase");
            integral += 0.5 * (s - samples[k - 1].first) * (v + samples[k - 1].second);
        }
    }
    const double need = delta * x_norm;
    if (integral < need - 1e-12 * std::abs(need))
        throw DomainError("find_witness_time: integral " + std::to_string(integral) + " is below delta |x| = " +
                          std::to_string(need));
    const auto best = std::max_element(samples.begin(), samples.end(),
                                       [](const auto& l, const auto& r) { return l.second < r.second; });
    return best->first;
}

double averaging_identity_rhs(std::span<const double> f, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("averaging identity needs sigma > 0");
    if (f.size() < 5) throw DomainError("averaging identity needs at least 5 samples");
    const std::size_t N = f.size() - 1;
    const double      h = sigma / static_cast<double>(N);

    const auto F = cumulative_cubic(f, h);

    // g(t) = t^{-2} int_0^t (f(t) - f(s)) ds = (t f(t) - F(t)) / t^2, finite as t -> 0.
    std::vector<double> g(N + 1);
    for (std::size_t k = 1; k <= N; ++k) {
        const double t = h * static_cast<double>(k);
        g[k]           = (t * f[k] - F[k]) / (t * t);
    }
    g[0] = 4.0 * g[1] - 6.0 * g[2] + 4.0 * g[3] - g[4];

    const auto G = cumulative_cubic(g, h);
    return F[N] / sigma - G[N];
}

double averaging_identity_residual(std::span<const double> f_samples, double sigma) {
    return std::abs(f_samples.front() - averaging_identity_rhs(f_samples, sigma));
}

}  // namespace ltv
