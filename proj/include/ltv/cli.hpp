#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ltv/hautus.hpp"
#include "ltv/synth.hpp"

namespace ltv::cli {

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk         = 0;
inline constexpr int kExitFailure    = 1;  ///< I/O error or failed self-check rows
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInfeasible = 3;

enum class Command { Analyze, Gramian, Synthesize, Hautus, FrozenCompare, Check, SelfCheck };

struct RunConfig {
    Command       command = Command::Check;
    std::string   system_path;
    std::string   output_dir = ".";
    std::uint64_t seed       = 1;

    Quadrature quadrature     = Quadrature::Trapezoid;
    Integrator method         = Integrator::RK4;
    int        substeps       = 4;
    double     coercivity_tol = kDefaultCoercivityTol;
    double     range_tol      = 1e-8;
    int        threads        = 1;

    // gramian
    GramianKind gramian_kind = GramianKind::Controllability;

    // synthesize: comma/whitespace separated numbers, or "@path" to read them from a file
    std::string x0;
    std::string target;
    bool        null_control = false;

    // hautus
    double              re_min   = 0.1;
    double              re_max   = 10.0;
    int                 re_count = 7;
    std::vector<double> im_parts = {0.0, 1.0, -1.0, 10.0, -10.0};
    int                 vectors  = 50;

    // frozen-compare: 0 = every grid node
    int frozen_samples = 0;

    // self-check
    std::optional<double> tolerance_override;
    std::string           filter;  ///< substring of reference-system names to run
};

/// Executes one subcommand, writing report files into output_dir and a short
/// summary to `out`. Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

std::string command_name(Command c);

/// Parses "1, 2 3" or "@file" into a vector.
Vector parse_vector_arg(const std::string& text, const std::string& flag);

struct ReferenceSystem {
    std::string name;
    LtvSystem   sys;
};

struct CheckRow {
    std::string system;
    std::string check;
    double      value;
    double      threshold;
    bool        pass;
};

/// Small systems the self-check runs on.
std::vector<ReferenceSystem> reference_systems();

/// Cocycle, adjoint identity and Lyapunov-vs-quadrature rows per system, plus one
/// averaging-identity row when `systems` is non-empty. A tolerance override
/// replaces every threshold.
std::vector<CheckRow> self_check(std::span<const ReferenceSystem> systems, std::optional<double> tolerance_override,
                                 std::uint64_t seed);

}  // namespace ltv::cli
