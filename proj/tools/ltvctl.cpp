#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "ltv/cli.hpp"

namespace {

using ltv::cli::Command;
using ltv::cli::RunConfig;

void add_common(CLI::App* sub, RunConfig& cfg, bool needs_system) {
    static const std::map<std::string, ltv::Quadrature> quadratures{{"trapezoid", ltv::Quadrature::Trapezoid},
                                                                    {"simpson", ltv::Quadrature::Simpson}};
    static const std::map<std::string, ltv::Integrator> methods{{"rk4", ltv::Integrator::RK4},
                                                                {"midpoint", ltv::Integrator::Midpoint}};
    if (needs_system) sub->add_option("-s,--system", cfg.system_path, "System spec (JSON)")->required();
    sub->add_option("-o,--out", cfg.output_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "PRNG seed")->capture_default_str();
    sub->add_option("--quadrature", cfg.quadrature, "trapezoid | simpson")
        ->transform(CLI::CheckedTransformer(quadratures, CLI::ignore_case));
    sub->add_option("--method", cfg.method, "rk4 | midpoint")->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
    sub->add_option("--substeps", cfg.substeps, "Integrator substeps per grid interval")
        ->check(CLI::Range(1, 1000))
        ->capture_default_str();
    sub->add_option("--tol", cfg.coercivity_tol, "Relative coercivity tolerance")->capture_default_str();
    sub->add_option("--range-tol", cfg.range_tol, "Relative range-inclusion residual tolerance")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Controllability and observability analysis for time-varying linear systems"};
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env = std::getenv("LTV_THREADS")) {
        try {
            cfg.threads = std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            std::cerr << "ignoring LTV_THREADS=" << env << "\n";
        }
    }

    auto* analyze = app.add_subcommand("analyze", "Exact and null controllability verdicts");
    add_common(analyze, cfg, true);

    auto* gramian = app.add_subcommand("gramian", "Gramian matrix and spectrum");
    add_common(gramian, cfg, true);
    const std::map<std::string, ltv::GramianKind> kinds{{"controllability", ltv::GramianKind::Controllability},
                                                        {"observability", ltv::GramianKind::Observability}};
    gramian->add_option("--kind", cfg.gramian_kind, "controllability | observability")
        ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));

    auto* synth = app.add_subcommand("synthesize", "Minimum-norm steering control");
    add_common(synth, cfg, true);
    synth->add_option("--x0", cfg.x0, "Initial state, e.g. \"1,0\" or @file");
    synth->add_option("--target", cfg.target, "Target state, e.g. \"0,1\" or @file");
    synth->add_flag("--null", cfg.null_control, "Steer to zero using the range-inclusion solve");

    auto* hautus = app.add_subcommand("hautus", "Non-autonomous Hautus margins");
    add_common(hautus, cfg, true);
    hautus->add_option("--re-min", cfg.re_min)->check(CLI::PositiveNumber)->capture_default_str();
    hautus->add_option("--re-max", cfg.re_max)->check(CLI::PositiveNumber)->capture_default_str();
    hautus->add_option("--re-count", cfg.re_count)->check(CLI::PositiveNumber)->capture_default_str();
    hautus->add_option("--im", cfg.im_parts, "Imaginary parts")->delimiter(',');
    hautus->add_option("--vectors", cfg.vectors, "Random unit test vectors")->check(CLI::PositiveNumber)->capture_default_str();

    auto* frozen = app.add_subcommand("frozen-compare", "Frozen-time observability constants versus delta");
    add_common(frozen, cfg, true);
    frozen->add_option("--samples", cfg.frozen_samples, "Number of freeze times (0 = every node)")->capture_default_str();

    auto* check = app.add_subcommand("check", "Validate a system spec");
    add_common(check, cfg, true);

    auto* self = app.add_subcommand("self-check", "Run the built-in invariant suite");
    add_common(self, cfg, false);
    self->add_option("--tolerance", cfg.tolerance_override, "Replace every threshold");
    self->add_option("--filter", cfg.filter, "Only reference systems whose name contains this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : ltv::cli::kExitValidation;
    }

    const std::pair<CLI::App*, Command> commands[] = {
        {analyze, Command::Analyze}, {gramian, Command::Gramian},      {synth, Command::Synthesize},
        {hautus, Command::Hautus},   {frozen, Command::FrozenCompare}, {check, Command::Check},
        {self, Command::SelfCheck}};
    for (const auto& [sub, command] : commands)
        if (sub->parsed()) cfg.command = command;

    return ltv::cli::run(cfg, std::cout, std::cerr);
}
