// Command-line front end: `run` a single level, `study` a convergence
// sweep, or `check` the built-in property bundle.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mcrs/checks.hpp"
#include "mcrs/runner.hpp"

namespace {

struct CliOptions {
    mcrs::RunConfig cfg;
    std::string dt_rule_text = "h";
    std::string pressure_space_text = "q1";
    std::string predictor_pressure_text = "projection";
    std::string bootstrap_text = "maccormack";
    std::string lambda1_text = "2pi2";
    std::string timing_text = "on";
    double nu_opt = std::numeric_limits<double>::quiet_NaN();
};

void add_common_options(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--test", o.cfg.test, "manufactured test case (test1|test2)")
        ->envname("MCRS_TEST");
    cmd->add_option("--nu", o.nu_opt, "viscosity (default: 0.1 for test1, 1.0 for test2)")
        ->envname("MCRS_NU");
    cmd->add_option("--T", o.cfg.T, "final time")->envname("MCRS_T");
    cmd->add_option("--ratio", o.cfg.ratio, "coarse-to-fine spacing ratio H/h")
        ->envname("MCRS_RATIO");
    cmd->add_option("--dt-rule", o.dt_rule_text, "h | fixed:<v> | scaled:<c>,<q>")
        ->envname("MCRS_DT_RULE");
    cmd->add_option("--viscous-theta", o.cfg.viscous_theta,
                    "coarse viscous weighting: 0 (explicit) or 0.5")
        ->envname("MCRS_VISCOUS_THETA");
    cmd->add_option("--pressure-space", o.pressure_space_text, "q1 | q1_plus_q0")
        ->envname("MCRS_PRESSURE_SPACE");
    cmd->add_option("--predictor-pressure", o.predictor_pressure_text, "projection | literal")
        ->envname("MCRS_PREDICTOR_PRESSURE");
    cmd->add_option("--bootstrap", o.bootstrap_text, "maccormack | backward_euler")
        ->envname("MCRS_BOOTSTRAP");
    cmd->add_option("--lambda1", o.lambda1_text, "Poincare eigenvalue (number or '2pi2')")
        ->envname("MCRS_LAMBDA1");
    cmd->add_option("--solver-tol", o.cfg.solver_tol, "relative residual tolerance")
        ->envname("MCRS_SOLVER_TOL");
    cmd->add_option("--energy-slack", o.cfg.energy_slack, "energy-monitor slack factor")
        ->envname("MCRS_ENERGY_SLACK");
    cmd->add_option("--out", o.cfg.out_dir, "output directory")->envname("MCRS_OUT");
    cmd->add_flag("--trace", o.cfg.write_trace, "write per-step trace CSVs")
        ->envname("MCRS_TRACE");
    cmd->add_option("--jobs", o.cfg.jobs, "parallel level workers (default 1, deterministic)")
        ->envname("MCRS_JOBS");
    cmd->add_flag("--allow-large", o.cfg.allow_large, "permit levels above 128")
        ->envname("MCRS_ALLOW_LARGE");
    cmd->add_option("--timing", o.timing_text, "on | off (off zeroes wall_seconds columns)")
        ->envname("MCRS_TIMING");
}

int resolve(CliOptions& o) {
    try {
        if (!std::isnan(o.nu_opt)) {
            if (o.nu_opt <= 0.0) throw mcrs::ConfigError("nu: must be positive");
            o.cfg.nu = o.nu_opt;
        }
        o.cfg.dt_rule = mcrs::DtRule::parse(o.dt_rule_text);
        if (o.pressure_space_text == "q1")
            o.cfg.pressure_space = mcrs::PressureSpaceKind::q1;
        else if (o.pressure_space_text == "q1_plus_q0")
            o.cfg.pressure_space = mcrs::PressureSpaceKind::q1_plus_q0;
        else
            throw mcrs::ConfigError("pressure-space: must be q1 or q1_plus_q0");
        if (o.predictor_pressure_text == "projection")
            o.cfg.predictor_pressure = mcrs::PredictorPressureMode::projection;
        else if (o.predictor_pressure_text == "literal")
            o.cfg.predictor_pressure = mcrs::PredictorPressureMode::literal;
        else
            throw mcrs::ConfigError("predictor-pressure: must be projection or literal");
        if (o.bootstrap_text == "maccormack")
            o.cfg.bootstrap = mcrs::BootstrapMethod::maccormack;
        else if (o.bootstrap_text == "backward_euler")
            o.cfg.bootstrap = mcrs::BootstrapMethod::backward_euler;
        else
            throw mcrs::ConfigError("bootstrap: must be maccormack or backward_euler");
        if (o.lambda1_text == "2pi2")
            o.cfg.lambda1 = 2.0 * std::numbers::pi * std::numbers::pi;
        else
            o.cfg.lambda1 = std::stod(o.lambda1_text);
        if (o.timing_text == "on")
            o.cfg.timing = true;
        else if (o.timing_text == "off")
            o.cfg.timing = false;
        else
            throw mcrs::ConfigError("timing: must be on or off");
        o.cfg.validate();
    } catch (const std::exception& e) {
        // validation messages arrive one per invalid field
        std::istringstream lines(e.what());
        std::string line;
        while (std::getline(lines, line)) std::cerr << "config error: " << line << "\n";
        return 64;
    }
    return 0;
}

void print_rows(const mcrs::StudyResult& study, const mcrs::RunConfig& cfg) {
    std::cout << mcrs::study_csv_header() << "\n";
    for (const auto& row : study.rows)
        std::cout << mcrs::study_csv_row(cfg.test, cfg.resolved_nu(), cfg.ratio, row) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-level MacCormack rapid solver for the 2D incompressible "
                 "Navier-Stokes equations with a manufactured-solution harness"};
    app.require_subcommand(1);

    CliOptions run_opt, study_opt;
    int run_level_n = 8;

    CLI::App* run_cmd = app.add_subcommand("run", "integrate a single fine level");
    add_common_options(run_cmd, run_opt);
    run_cmd->add_option("--level", run_level_n, "fine cells per side")->envname("MCRS_LEVEL");

    CLI::App* study_cmd = app.add_subcommand("study", "convergence sweep over levels");
    add_common_options(study_cmd, study_opt);
    study_cmd
        ->add_option("--levels", study_opt.cfg.levels, "fine levels, e.g. 8,16,32")
        ->delimiter(',')
        ->envname("MCRS_LEVELS");

    CLI::App* check_cmd = app.add_subcommand("check", "run the property-check bundle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 64;
    }

    if (check_cmd->parsed()) {
        bool all = true;
        for (const auto& r : mcrs::run_check_bundle()) {
            std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.describe() << "\n";
            all = all && r.pass;
        }
        return all ? 0 : 2;
    }

    if (run_cmd->parsed()) {
        run_opt.cfg.levels = {run_level_n};
        if (int rc = resolve(run_opt); rc != 0) return rc;
        const auto study = mcrs::run_study(run_opt.cfg);
        print_rows(study, run_opt.cfg);
        const auto& r = study.runs.front();
        if (!r.completed) std::cerr << "level " << r.level << " failed: " << r.failure << "\n";
        return study.exit_code;
    }

    if (int rc = resolve(study_opt); rc != 0) return rc;
    const auto study = mcrs::run_study(study_opt.cfg);
    print_rows(study, study_opt.cfg);
    for (const auto& r : study.runs)
        if (!r.completed) std::cerr << "level " << r.level << " failed: " << r.failure << "\n";
    return study.exit_code;
}
