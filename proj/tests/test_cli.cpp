#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ltv/cli.hpp"

using namespace ltv;
namespace fs = std::filesystem;

#ifndef LTV_SYSTEMS_DIR
#error "LTV_SYSTEMS_DIR must be defined"
#endif

namespace {

const std::string kSystems = LTV_SYSTEMS_DIR;

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ltv_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream     in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Outcome {
    int         code;
    std::string out;
    std::string err;
};

Outcome run_cli(const cli::RunConfig& cfg) {
    std::ostringstream out, err;
    const int          code = cli::run(cfg, out, err);
    return {code, out.str(), err.str()};
}

cli::RunConfig config(cli::Command command, const std::string& system, const fs::path& dir) {
    cli::RunConfig cfg;
    cfg.command     = command;
    cfg.system_path = system.empty() ? std::string() : kSystems + "/" + system;
    cfg.output_dir  = dir.string();
    return cfg;
}

}  // namespace

TEST_CASE("check") {
    const auto dir = fresh_dir("check");
    auto       bad = run_cli(config(cli::Command::Check, "bad_b_shape.json", dir));
    CHECK(bad.code == cli::kExitValidation);
    CHECK(bad.err.find("B") != std::string::npos);
    const auto doc = nlohmann::json::parse(slurp(dir / "check.json"));
    CHECK(doc["valid"] == false);
    CHECK(doc["field"] == "B");
    CHECK(doc["schema_version"] == 1);

    CHECK(run_cli(config(cli::Command::Check, "scalar_unit.json", dir)).code == cli::kExitOk);
    CHECK(run_cli(config(cli::Command::Check, "no_such_file.json", dir)).code == cli::kExitFailure);
}

TEST_CASE("analyze on the scalar system") {
    const auto dir = fresh_dir("analyze");
    const auto r   = run_cli(config(cli::Command::Analyze, "scalar_unit.json", dir));
    CHECK(r.code == cli::kExitOk);
    const auto doc = nlohmann::json::parse(slurp(dir / "analyze.json"));
    CHECK(doc["command"] == "analyze");
    CHECK(doc["report"]["controllable"] == true);
    CHECK(doc["report"]["lambda_min_W"].get<double>() == doctest::Approx((1 - std::exp(-2.0)) / 2).epsilon(1e-6));
}

TEST_CASE("synthesize on the scalar system") {
    const auto dir = fresh_dir("synth");
    auto       cfg = config(cli::Command::Synthesize, "scalar_unit.json", dir);
    cfg.x0         = "0";
    cfg.target     = "1";
    cfg.quadrature = Quadrature::Simpson;
    REQUIRE(run_cli(cfg).code == cli::kExitOk);

    std::istringstream csv(slurp(dir / "control.csv"));
    std::string        line;
    std::getline(csv, line);
    CHECK(line == "t,u_1");
    const double W    = (1 - std::exp(-2.0)) / 2;
    int          rows = 0;
    while (std::getline(csv, line)) {
        const auto   comma = line.find(',');
        const double t     = std::stod(line.substr(0, comma));
        const double u     = std::stod(line.substr(comma + 1));
        CHECK(u == doctest::Approx(std::exp(-(1 - t)) / W).epsilon(1e-8));
        ++rows;
    }
    CHECK(rows == 1001);

    cfg.x0 = "1,2";
    CHECK(run_cli(cfg).code == cli::kExitValidation);
    cfg.x0 = "abc";
    CHECK(run_cli(cfg).code == cli::kExitValidation);
}

TEST_CASE("infeasible synthesis writes a verdict") {
    const auto dir = fresh_dir("infeasible");
    fs::create_directories(dir);
    {
        std::ofstream spec(dir / "zero_b.json");
        spec << R"({"n": 1, "m": 1, "p": 1, "tau": 1.0, "steps": 20,
                   "A": {"kind": "constant", "data": [[1.0]]},
                   "B": {"kind": "constant", "data": [[0.0]]},
                   "C": {"kind": "constant", "data": [[1.0]]}})";
    }
    auto cfg        = config(cli::Command::Synthesize, "", dir);
    cfg.system_path = (dir / "zero_b.json").string();
    cfg.target      = "1";
    CHECK(run_cli(cfg).code == cli::kExitInfeasible);
    CHECK(nlohmann::json::parse(slurp(dir / "synthesize.json"))["verdict"] == "not_controllable");

    cfg.null_control = true;
    cfg.x0           = "1";
    CHECK(run_cli(cfg).code == cli::kExitInfeasible);
    CHECK(nlohmann::json::parse(slurp(dir / "synthesize.json"))["verdict"] == "not_null_controllable");

    cfg.command = cli::Command::Analyze;
    CHECK(run_cli(cfg).code == cli::kExitInfeasible);
    CHECK(nlohmann::json::parse(slurp(dir / "analyze.json"))["report"]["null_inclusion_c"].is_null());
}

TEST_CASE("reports are byte-identical across runs") {
    for (auto command : {cli::Command::Analyze, cli::Command::Gramian, cli::Command::Synthesize, cli::Command::Hautus,
                         cli::Command::FrozenCompare}) {
        const auto a = fresh_dir("det_a");
        const auto b = fresh_dir("det_b");
        for (const auto& dir : {a, b}) {
            auto cfg     = config(command, "rotating_input.json", dir);
            cfg.x0       = "1,-1";
            cfg.target   = "0.5,0.25";
            cfg.vectors  = 10;
            cfg.seed     = 42;
            cfg.threads  = dir == a ? 1 : 3;
            cfg.frozen_samples = 9;
            REQUIRE(run_cli(cfg).code == cli::kExitOk);
        }
        int files = 0;
        for (const auto& entry : fs::directory_iterator(a)) {
            CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
            ++files;
        }
        CHECK(files == (command == cli::Command::Analyze ? 1 : 2));
    }
}

TEST_CASE("self-check") {
    const auto dir = fresh_dir("self");
    auto       cfg = config(cli::Command::SelfCheck, "", dir);
    const auto ok  = run_cli(cfg);
    CHECK(ok.code == cli::kExitOk);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    CHECK(nlohmann::json::parse(slurp(dir / "self_check.json"))["passed"] == true);

    cfg.tolerance_override = 1e-15;
    const auto strict      = run_cli(cfg);
    CHECK(strict.code == cli::kExitFailure);
    CHECK(strict.out.find("FAIL") != std::string::npos);

    cfg.tolerance_override.reset();
    cfg.filter       = "no-such-system";
    const auto empty = run_cli(cfg);
    CHECK(empty.code == cli::kExitOk);
    CHECK(nlohmann::json::parse(slurp(dir / "self_check.json"))["rows"].empty());
}

TEST_CASE("parse_vector_arg") {
    CHECK(cli::parse_vector_arg("1, 2 3", "--x0") == (Vector(3) << 1, 2, 3).finished());
    CHECK(cli::parse_vector_arg("[0.5;-1]", "--x0") == (Vector(2) << 0.5, -1).finished());
    CHECK_THROWS_AS(cli::parse_vector_arg("", "--x0"), SpecError);
    CHECK_THROWS_AS(cli::parse_vector_arg("1, nan", "--x0"), SpecError);
}
