#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"
#include "ltv/cli.hpp"

namespace ltv::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

// JSON has no infinity; +inf is written as null.
ordered_json finite_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json matrix_json(const Matrix& M) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json vector_json(const Vector& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

const char* quadrature_name(Quadrature q) { return q == Quadrature::Simpson ? "simpson" : "trapezoid"; }
const char* method_name(Integrator m) { return m == Integrator::Midpoint ? "midpoint" : "rk4"; }

ordered_json header(const RunConfig& cfg, const LtvSystem* sys) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"]        = command_name(cfg.command);
    if (sys) {
        doc["system"] = {{"n", sys->n()}, {"m", sys->m()}, {"p", sys->p()}, {"tau", sys->tau()}, {"steps", sys->grid().steps()}};
    }
    doc["settings"] = {{"quadrature", quadrature_name(cfg.quadrature)},
                       {"integrator", method_name(cfg.method)},
                       {"substeps", cfg.substeps},
                       {"coercivity_tol", cfg.coercivity_tol},
                       {"range_tol", cfg.range_tol},
                       {"seed", cfg.seed}};
    return doc;
}

struct Context {
    const RunConfig& cfg;
    fs::path         dir;
    std::ostream&    out;

    void write_json(const std::string& name, const ordered_json& doc) const { write_file(dir / name, doc.dump(2) + "\n"); }
    void write_text(const std::string& name, const std::string& text) const { write_file(dir / name, text); }
};

PropagatorOptions propagator_options(const RunConfig& cfg) { return {cfg.method, cfg.substeps}; }

int do_check(const Context& ctx, const LtvSystem& sys) {
    ordered_json doc = header(ctx.cfg, &sys);
    doc["valid"]     = true;
    ctx.write_json("check.json", doc);
    fmt::print(ctx.out, "ok: n={} m={} p={} tau={} steps={}\n", sys.n(), sys.m(), sys.p(), num(sys.tau()),
               sys.grid().steps());
    return kExitOk;
}

int do_analyze(const Context& ctx, const LtvSystem& sys) {
    const Propagator     prop(sys, propagator_options(ctx.cfg));
    const DualityOptions opts{ctx.cfg.quadrature, ctx.cfg.coercivity_tol, ctx.cfg.range_tol};
    const DualityReport  r  = exact_controllability_test(prop, opts);
    const GrowthBound    gb = prop.growth_bound();

    ordered_json doc   = header(ctx.cfg, &sys);
    doc["report"]      = {{"controllable", r.controllable},
                          {"lambda_min_W", r.lambda_min_W},
                          {"lambda_max_W", r.lambda_max_W},
                          {"obs_constant_delta", r.obs_constant_delta},
                          {"admissibility_M", r.admissibility_M},
                          {"null_controllable", r.null_controllable},
                          {"null_inclusion_c", finite_or_null(r.null_inclusion_c)}};
    doc["growth_bound"] = {{"M", gb.M}, {"omega", gb.omega}};
    ctx.write_json("analyze.json", doc);

    fmt::print(ctx.out, "controllable={} lambda_min_W={} delta={} M_adm={} null_controllable={} c={} omega={}\n",
               r.controllable ? "yes" : "no", num(r.lambda_min_W), num(r.obs_constant_delta), num(r.admissibility_M),
               r.null_controllable ? "yes" : "no", std::isfinite(r.null_inclusion_c) ? num(r.null_inclusion_c) : "inf",
               num(gb.omega));
    return r.controllable ? kExitOk : kExitInfeasible;
}

ordered_json gramian_json(const GramianResult& g, double tol) {
    return {{"method", g.method == GramianMethod::Quadrature ? "quadrature" : "lyapunov_ode"},
            {"matrix", matrix_json(g.W)},
            {"eigenvalues", vector_json(g.eigenvalues)},
            {"lambda_min", g.lambda_min},
            {"lambda_max", g.lambda_max},
            {"coercive", coercivity_check(g, tol).coercive},
            {"cross_residual", g.cross_residual ? ordered_json(*g.cross_residual) : ordered_json(nullptr)}};
}

int do_gramian(const Context& ctx, const LtvSystem& sys) {
    const Propagator prop(sys, propagator_options(ctx.cfg));
    std::vector<GramianResult> results;
    if (ctx.cfg.gramian_kind == GramianKind::Controllability) {
        results.push_back(ctrl_gramian_quadrature(prop, ctx.cfg.quadrature));
        results.push_back(ctrl_gramian_lyapunov(sys, propagator_options(ctx.cfg)));
        cross_check(results[0], results[1]);
    } else {
        results.push_back(obs_gramian(prop, ctx.cfg.quadrature));
    }

    ordered_json doc = header(ctx.cfg, &sys);
    doc["kind"]      = ctx.cfg.gramian_kind == GramianKind::Controllability ? "controllability" : "observability";
    doc["results"]   = ordered_json::array();
    std::string csv  = "method,index,eigenvalue\n";
    for (const auto& g : results) {
        doc["results"].push_back(gramian_json(g, ctx.cfg.coercivity_tol));
        const char* method = g.method == GramianMethod::Quadrature ? "quadrature" : "lyapunov_ode";
        for (Eigen::Index i = 0; i < g.eigenvalues.size(); ++i) csv += fmt::format("{},{},{}\n", method, i, num(g.eigenvalues(i)));
    }
    ctx.write_json("gramian.json", doc);
    ctx.write_text("gramian_eigenvalues.csv", csv);

    const auto& g = results.front();
    fmt::print(ctx.out, "{} Gramian: lambda_min={} lambda_max={}{}\n", doc["kind"].get<std::string>(), num(g.lambda_min),
               num(g.lambda_max), g.cross_residual ? " cross_residual=" + num(*g.cross_residual) : std::string());
    return kExitOk;
}

int do_synthesize(const Context& ctx, const LtvSystem& sys) {
    const Propagator prop(sys, propagator_options(ctx.cfg));
    const Vector     x0 = ctx.cfg.x0.empty() ? Vector::Zero(sys.n()) : parse_vector_arg(ctx.cfg.x0, "--x0");
    const Vector target = ctx.cfg.null_control || ctx.cfg.target.empty() ? Vector::Zero(sys.n())
                                                                          : parse_vector_arg(ctx.cfg.target, "--target");
    if (x0.size() != sys.n()) throw SpecError("--x0", "expected " + std::to_string(sys.n()) + " entries");
    if (target.size() != sys.n()) throw SpecError("--target", "expected " + std::to_string(sys.n()) + " entries");

    ordered_json doc = header(ctx.cfg, &sys);
    doc["mode"]      = ctx.cfg.null_control ? "null" : "min_norm";
    doc["x0"]        = vector_json(x0);
    doc["target"]    = vector_json(target);

    const SynthOptions opts{ctx.cfg.quadrature, ctx.cfg.coercivity_tol, ctx.cfg.range_tol};
    try {
        const SynthesisResult r = ctx.cfg.null_control ? null_control(prop, x0, opts) : min_norm_control(prop, x0, target, opts);
        doc["verdict"]         = "ok";
        doc["target_residual"] = r.target_residual;
        doc["cost"]            = r.cost;
        doc["gramian_cost"]    = r.gramian_cost;
        doc["condition"]       = r.condition;

        std::string csv = "t";
        for (int j = 1; j <= sys.m(); ++j) csv += fmt::format(",u_{}", j);
        csv += "\n";
        const auto& g = prop.grid();
        for (int i = 0; i <= g.steps(); ++i) {
            csv += num(g[i]);
            for (int j = 0; j < sys.m(); ++j) csv += "," + num(r.control.values()(j, i));
            csv += "\n";
        }
        ctx.write_text("control.csv", csv);
        ctx.write_json("synthesize.json", doc);
        fmt::print(ctx.out, "cost={} gramian_cost={} target_residual={}\n", num(r.cost), num(r.gramian_cost),
                   num(r.target_residual));
        return kExitOk;
    } catch (const NotControllable& e) {
        doc["verdict"]    = "not_controllable";
        doc["lambda_min"] = e.lambda_min();
        ctx.write_json("synthesize.json", doc);
        fmt::print(ctx.out, "not controllable: {}\n", e.what());
    } catch (const NotNullControllable& e) {
        doc["verdict"] = "not_null_controllable";
        ctx.write_json("synthesize.json", doc);
        fmt::print(ctx.out, "not null-controllable: {}\n", e.what());
    } catch (const SolveError& e) {
        doc["verdict"]   = "solve_failed";
        doc["condition"] = e.condition();
        ctx.write_json("synthesize.json", doc);
        fmt::print(ctx.out, "{}\n", e.what());
    }
    return kExitInfeasible;
}

int do_hautus(const Context& ctx, const LtvSystem& sys) {
    const Propagator prop(sys, propagator_options(ctx.cfg));
    const auto grid = HautusGrid::make(sys.n(), ctx.cfg.re_min, ctx.cfg.re_max, ctx.cfg.re_count, ctx.cfg.im_parts,
                                       ctx.cfg.vectors, ctx.cfg.seed);
    const auto r = hautus_sweep(prop, grid, {ctx.cfg.quadrature, ctx.cfg.threads});

    std::string csv = "re_lambda,im_lambda,vector,margin\n";
    for (std::size_t l = 0; l < grid.lambdas().size(); ++l)
        for (std::size_t v = 0; v < grid.test_vectors().size(); ++v)
            csv += fmt::format("{},{},{},{}\n", num(grid.lambdas()[l].real()), num(grid.lambdas()[l].imag()), v,
                               num(r.margins(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(v))));
    ctx.write_text("hautus_margins.csv", csv);

    ordered_json doc = header(ctx.cfg, &sys);
    const bool   has_points = r.witness_vector_index >= 0;
    doc["report"] = {{"delta", r.delta},
                     {"M", r.M},
                     {"min_margin", finite_or_null(r.min_margin)},
                     {"witness",
                      has_points ? ordered_json{{"re_lambda", r.witness_lambda.real()},
                                                {"im_lambda", r.witness_lambda.imag()},
                                                {"lambda_index", r.witness_lambda_index},
                                                {"vector_index", r.witness_vector_index}}
                                 : ordered_json(nullptr)},
                     {"lambda_count", grid.lambdas().size()},
                     {"vector_count", grid.test_vectors().size()},
                     {"time_varying_c", r.time_varying_c},
                     {"necessary_condition_holds", !has_points || r.min_margin >= -1e-9}};
    ctx.write_json("hautus.json", doc);
    fmt::print(ctx.out, "delta={} M={} min_margin={}{}\n", num(r.delta), num(r.M), num(r.min_margin),
               r.time_varying_c ? " (boundary term uses C(0))" : "");
    return kExitOk;
}

int do_frozen(const Context& ctx, const LtvSystem& sys) {
    const Propagator prop(sys, propagator_options(ctx.cfg));
    const auto       r = frozen_vs_ltv_report(prop, ctx.cfg.frozen_samples, ctx.cfg.quadrature);

    std::string csv = "s,m\n";
    for (const auto& [s, m] : r.samples) csv += fmt::format("{},{}\n", num(s), num(m));
    ctx.write_text("frozen.csv", csv);

    ordered_json doc = header(ctx.cfg, &sys);
    doc["report"]    = {{"delta_ltv", r.delta_ltv}, {"inf_frozen", r.inf_frozen}, {"sample_count", r.samples.size()}};
    ctx.write_json("frozen.json", doc);
    fmt::print(ctx.out, "delta_ltv={} inf_frozen={}\n", num(r.delta_ltv), num(r.inf_frozen));
    return kExitOk;
}

int do_self_check(const Context& ctx) {
    std::vector<ReferenceSystem> systems;
    for (auto& ref : reference_systems())
        if (ref.name.find(ctx.cfg.filter) != std::string::npos) systems.push_back(std::move(ref));
    const auto rows = self_check(systems, ctx.cfg.tolerance_override, ctx.cfg.seed);

    ordered_json doc = header(ctx.cfg, nullptr);
    doc["rows"]      = ordered_json::array();
    bool all_pass    = true;
    fmt::print(ctx.out, "{:<22} {:<24} {:>12} {:>12}  {}\n", "system", "check", "value", "threshold", "result");
    for (const auto& row : rows) {
        all_pass = all_pass && row.pass;
        doc["rows"].push_back({{"system", row.system},
                               {"check", row.check},
                               {"value", row.value},
                               {"threshold", row.threshold},
                               {"pass", row.pass}});
        fmt::print(ctx.out, "{:<22} {:<24} {:>12.3e} {:>12.3e}  {}\n", row.system, row.check, row.value, row.threshold,
                   row.pass ? "PASS" : "FAIL");
    }
    doc["passed"] = all_pass;
    ctx.write_json("self_check.json", doc);
    return all_pass ? kExitOk : kExitFailure;
}

}  // namespace

std::string command_name(Command c) {
    switch (c) {
        case Command::Analyze: return "analyze";
        case Command::Gramian: return "gramian";
        case Command::Synthesize: return "synthesize";
        case Command::Hautus: return "hautus";
        case Command::FrozenCompare: return "frozen-compare";
        case Command::Check: return "check";
        case Command::SelfCheck: return "self-check";
    }
    return "";
}

Vector parse_vector_arg(const std::string& text, const std::string& flag) {
    std::string body = text;
    if (!body.empty() && body.front() == '@') body = read_file(body.substr(1));
    for (char& ch : body)
        if (ch == ',' || ch == ';' || ch == '[' || ch == ']') ch = ' ';
    std::istringstream  in(body);
    std::vector<double> values;
    std::string         token;
    while (in >> token) {
        std::size_t used = 0;
        double      x    = 0.0;
        try {
            x = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || !std::isfinite(x)) throw SpecError(flag, "not a finite number: \"" + token + "\"");
        values.push_back(x);
    }
    if (values.empty()) throw SpecError(flag, "empty vector");
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        if (!fs::is_directory(cfg.output_dir)) throw IoError("cannot create output directory " + cfg.output_dir);
        const Context ctx{cfg, fs::path(cfg.output_dir), out};

        if (cfg.command == Command::SelfCheck) return do_self_check(ctx);

        std::optional<LtvSystem> sys;
        try {
            sys.emplace(parse_system(read_file(cfg.system_path)));
        } catch (const SpecError& e) {
            if (cfg.command == Command::Check) {
                ordered_json doc = header(cfg, nullptr);
                doc["valid"]     = false;
                doc["field"]     = e.field();
                doc["message"]   = e.message();
                ctx.write_json("check.json", doc);
            }
            throw;
        }

        switch (cfg.command) {
            case Command::Check: return do_check(ctx, *sys);
            case Command::Analyze: return do_analyze(ctx, *sys);
            case Command::Gramian: return do_gramian(ctx, *sys);
            case Command::Synthesize: return do_synthesize(ctx, *sys);
            case Command::Hautus: return do_hautus(ctx, *sys);
            case Command::FrozenCompare: return do_frozen(ctx, *sys);
            case Command::SelfCheck: break;
        }
        return kExitOk;
    } catch (const SpecError& e) {
        fmt::print(err, "validation error: {}\n", e.what());
        return kExitValidation;
    } catch (const DomainError& e) {
        fmt::print(err, "validation error: {}\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitFailure;
    }
}

}  // namespace ltv::cli
