#include <algorithm>
#include <cmath>

#include "ltv/cli.hpp"
#include "ltv/random.hpp"

namespace ltv::cli {

namespace {

constexpr double kCocycleTol  = 1e-8;
constexpr double kAdjointTol  = 1e-8;
constexpr double kLyapunovTol = 1e-6;
constexpr double kAveragingTol = 1e-5;

Matrix mat(int rows, int cols, std::initializer_list<double> values) {
    Matrix M(rows, cols);
    auto   it = values.begin();
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) M(r, c) = *it++;
    return M;
}

double max_cocycle_defect(const Propagator& prop) {
    const int N = prop.steps();
    const int stride = std::max(1, N / 10);
    double worst = 0.0;
    for (int i = 0; i <= N; i += stride)
        for (int j = i; j <= N; j += stride)
            for (int k = j; k <= N; k += stride) {
                const Matrix direct = prop.transition(i, k);
                const Matrix split  = prop.transition(j, k) * prop.transition(i, j);
                worst = std::max(worst, (direct - split).norm() / direct.norm());
            }
    return worst;
}

double adjoint_defect(const Propagator& prop, Lcg64& rng) {
    const auto& sys = prop.system();
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        Matrix values(sys.m(), prop.steps() + 1);
        for (Eigen::Index k = 0; k < values.size(); ++k) values.data()[k] = rng.uniform(-1.0, 1.0);
        const ControlSignal u(prop.grid(), std::move(values));
        const Vector z = rng.unit_vector(sys.n());
        worst = std::max(worst, adjoint_identity_residual(prop, u, z) / std::max(l2_norm(u), 1e-300));
    }
    return worst;
}

}  // namespace

std::vector<ReferenceSystem> reference_systems() {
    std::vector<ReferenceSystem> out;
    {
        const auto g = TimeGrid::uniform(1.0, 200);
        out.push_back({"scalar_decay", LtvSystem(CoeffMatrixFn::constant(mat(1, 1, {1.0}), 1.0),
                                                 CoeffMatrixFn::constant(mat(1, 1, {1.0}), 1.0),
                                                 CoeffMatrixFn::constant(mat(1, 1, {1.0}), 1.0), g)});
    }
    {
        // x1' = x2, x2' = u
        const auto g = TimeGrid::uniform(1.0, 200);
        out.push_back({"double_integrator", LtvSystem(CoeffMatrixFn::constant(mat(2, 2, {0, -1, 0, 0}), 1.0),
                                                      CoeffMatrixFn::constant(mat(2, 1, {0, 1}), 1.0),
                                                      CoeffMatrixFn::constant(mat(1, 2, {1, 0}), 1.0), g)});
    }
    {
        const double tau = 1.5;
        const auto   g   = TimeGrid::uniform(tau, 300);
        std::vector<Matrix> a = {mat(3, 3, {0.5, -1.0, 0.0, 1.0, 0.2, 0.3, 0.0, -0.4, 0.8}),
                                 mat(3, 3, {0.3, 0.0, 0.1, 0.0, -0.2, 0.0, 0.2, 0.0, 0.1}),
                                 mat(3, 3, {0.0, 0.1, 0.0, -0.1, 0.0, 0.0, 0.0, 0.0, -0.2})};
        std::vector<Matrix> b = {mat(3, 1, {1.0, 0.0, 0.5}), mat(3, 1, {0.0, 0.5, 0.0})};
        out.push_back({"poly_time_varying", LtvSystem(CoeffMatrixFn::polynomial(a, tau), CoeffMatrixFn::polynomial(b, tau),
                                                      CoeffMatrixFn::constant(mat(1, 3, {1, 0, 0}), tau), g)});
    }
    {
        const auto          g = TimeGrid::uniform(2.0, 400);
        std::vector<Matrix> samples;
        for (double t : g.nodes()) samples.push_back(mat(2, 2, {1.0 + 0.5 * std::sin(t), -1.0, 1.0, 0.5 * std::cos(t)}));
        out.push_back({"sampled_oscillator", LtvSystem(CoeffMatrixFn::samples(g, samples),
                                                       CoeffMatrixFn::constant(mat(2, 1, {0, 1}), 2.0),
                                                       CoeffMatrixFn::constant(mat(1, 2, {1, 0}), 2.0), g)});
    }
    return out;
}

std::vector<CheckRow> self_check(std::span<const ReferenceSystem> systems, std::optional<double> tolerance_override,
                                 std::uint64_t seed) {
    std::vector<CheckRow> rows;
    auto add = [&](const std::string& system, const std::string& check, double value, double tol) {
        const double threshold = tolerance_override.value_or(tol);
        rows.push_back({system, check, value, threshold, value <= threshold});
    };

    Lcg64 rng(seed);
    for (const auto& ref : systems) {
        const Propagator prop(ref.sys);
        add(ref.name, "cocycle", max_cocycle_defect(prop), kCocycleTol);
        add(ref.name, "adjoint_identity", adjoint_defect(prop, rng), kAdjointTol);

        const auto quad = ctrl_gramian_quadrature(prop, Quadrature::Simpson);
        const auto lyap = ctrl_gramian_lyapunov(ref.sys);
        add(ref.name, "lyapunov_vs_quadrature", (quad.W - lyap.W).norm() / (1.0 + quad.W.norm()), kLyapunovTol);
    }

    if (!systems.empty()) {
        const int           N = 1000;
        std::vector<double> f(N + 1);
        for (int k = 0; k <= N; ++k) f[k] = std::cos(static_cast<double>(k) / N);
        add("cos_on_unit_interval", "averaging_identity", averaging_identity_residual(f, 1.0), kAveragingTol);
    }
    return rows;
}

}  // namespace ltv::cli
