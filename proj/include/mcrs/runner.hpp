#pragma once

// Run orchestration: validated configuration, a full coupled run at one
// level, convergence studies over level sweeps, and the CSV/metadata/trace
// artifacts the CLI emits.

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mcrs/manufactured.hpp"
#include "mcrs/timestepping.hpp"
#include "mcrs/verification.hpp"

namespace mcrs {

#ifdef MCRS_GIT_DESCRIBE
inline constexpr const char* kVersion = "mcrs 0.1.0 " MCRS_GIT_DESCRIBE;
#else
inline constexpr const char* kVersion = "mcrs 0.1.0";
#endif

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DtRule {
    enum class Kind { dt_equals_h, fixed, scaled } kind = Kind::dt_equals_h;
    double value = 0.0;  // fixed dt
    double coeff = 1.0;  // scaled: dt = coeff * h^power
    double power = 1.0;

    double dt_for(double h) const {
        switch (kind) {
            case Kind::dt_equals_h: return h;
            case Kind::fixed: return value;
            case Kind::scaled: return coeff * std::pow(h, power);
        }
        return h;
    }

    std::string describe() const {
        switch (kind) {
            case Kind::dt_equals_h: return "dt_equals_h";
            case Kind::fixed: return "fixed:" + format_double(value);
            case Kind::scaled: return "scaled:" + format_double(coeff) + "," + format_double(power);
        }
        return "?";
    }

    /// Accepts "h" / "dt_equals_h", "fixed:<v>", "scaled:<c>,<q>".
    static DtRule parse(const std::string& text) {
        DtRule r;
        if (text == "h" || text == "dt_equals_h") return r;
        const auto colon = text.find(':');
        const std::string head = text.substr(0, colon);
        if (colon == std::string::npos)
            throw ConfigError("dt-rule: expected 'h', 'fixed:<v>' or 'scaled:<c>,<q>', got '" + text + "'");
        const std::string tail = text.substr(colon + 1);
        try {
            if (head == "fixed") {
                r.kind = Kind::fixed;
                r.value = std::stod(tail);
                if (r.value <= 0.0) throw ConfigError("dt-rule: fixed dt must be positive");
                return r;
            }
            if (head == "scaled") {
                const auto comma = tail.find(',');
                if (comma == std::string::npos)
                    throw ConfigError("dt-rule: scaled form is 'scaled:<c>,<q>'");
                r.kind = Kind::scaled;
                r.coeff = std::stod(tail.substr(0, comma));
                r.power = std::stod(tail.substr(comma + 1));
                if (r.coeff <= 0.0) throw ConfigError("dt-rule: scale coefficient must be positive");
                return r;
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("dt-rule: malformed number in '" + text + "'");
        }
        throw ConfigError("dt-rule: unknown kind '" + head + "'");
    }
};

struct RunConfig {
    std::string test = "test1";
    std::optional<double> nu;  // default depends on the test
    double T = 4.0;
    std::vector<int> levels;
    int ratio = 2;
    DtRule dt_rule;
    double viscous_theta = 0.5;
    PressureSpaceKind pressure_space = PressureSpaceKind::q1;
    PredictorPressureMode predictor_pressure = PredictorPressureMode::projection;
    BootstrapMethod bootstrap = BootstrapMethod::maccormack;
    double lambda1 = 2.0 * std::numbers::pi * std::numbers::pi;
    double solver_tol = 1e-10;
    double energy_slack = 1.05;
    std::string out_dir = "out";
    bool write_trace = false;
    int jobs = 1;
    bool allow_large = false;
    bool timing = true;

    double resolved_nu() const {
        if (nu) return *nu;
        return test == "test1" ? 0.1 : 1.0;
    }

    SchemeOptions scheme_options() const {
        SchemeOptions o;
        o.theta = viscous_theta;
        o.predictor_pressure = predictor_pressure;
        o.bootstrap = bootstrap;
        o.tol = solver_tol;
        return o;
    }

    /// One diagnostic per invalid field.
    std::vector<std::string> validation_errors() const {
        std::vector<std::string> errs;
        if (test != "test1" && test != "test2") errs.push_back("test: must be test1 or test2");
        if (resolved_nu() <= 0.0) errs.push_back("nu: must be positive");
        if (T <= 0.0) errs.push_back("T: must be positive");
        if (ratio < 1) errs.push_back("ratio: must be >= 1");
        if (levels.empty()) errs.push_back("levels: list must be nonempty");
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (levels[i] < 1) {
                errs.push_back("levels: entries must be >= 1");
                break;
            }
            if (i > 0 && levels[i] <= levels[i - 1]) {
                errs.push_back("levels: list must be strictly increasing");
                break;
            }
            if (ratio >= 1 && levels[i] % ratio != 0) {
                errs.push_back("levels: each fine level must be divisible by ratio");
                break;
            }
            if (levels[i] > 128 && !allow_large) {
                errs.push_back("levels: entries above 128 require --allow-large");
                break;
            }
        }
        if (viscous_theta != 0.0 && viscous_theta != 0.5)
            errs.push_back("viscous-theta: must be 0 or 0.5");
        if (lambda1 <= 0.0) errs.push_back("lambda1: must be positive");
        if (solver_tol <= 0.0) errs.push_back("solver-tol: must be positive");
        if (energy_slack < 1.0) errs.push_back("energy-slack: must be >= 1");
        if (jobs < 1) errs.push_back("jobs: must be >= 1");
        return errs;
    }

    void validate() const {
        const auto errs = validation_errors();
        if (errs.empty()) return;
        std::string joined;
        for (const auto& e : errs) {
            if (!joined.empty()) joined += "\n";
            joined += e;
        }
        throw ConfigError(joined);
    }
};

struct TraceRow {
    int n = 0;
    double t = 0.0;
    double norm_u_coarse = 0.0;
    double norm_u_fine = 0.0;
    double div_residual = 0.0;
    double energy_lhs = 0.0;
    double energy_rhs = 0.0;
};

struct RunResult {
    int level = 0;
    double h = 0.0, dt = 0.0;
    int steps = 0;
    bool completed = false;
    std::string failure;
    double e_u = 0.0, e_p = 0.0, e_gradu = 0.0;
    bool energy_ok = true;
    double max_div = 0.0;
    double wall_seconds = 0.0;
    CflDiagnostic cfl;
    EnergyLedger ledger;
    std::vector<TraceRow> trace;
};

namespace detail {

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace detail

/// Full coupled run of one test at one fine level.
inline RunResult run_level(const RunConfig& cfg, const ManufacturedSolution& sol, int level,
                           bool collect_trace) {
    const auto start = std::chrono::steady_clock::now();
    RunResult out;
    out.level = level;
    out.h = 1.0 / level;
    out.dt = cfg.dt_rule.dt_for(out.h);
    const double nu = cfg.resolved_nu();
    try {
        const TimeGrid grid(out.dt, cfg.T);
        out.steps = grid.steps;
        const auto hier = build_hierarchy(level / cfg.ratio, cfg.ratio);
        out.cfl = cfl_diagnostic(hier.coarse.spacing, nu, out.dt);
        const auto opts = cfg.scheme_options();
        const McrsScheme scheme(hier, nu, out.dt, opts, cfg.pressure_space);
        const TimeVectorField forcing = [&sol, nu](double t, double x, double y) {
            const Vec2 f = sol.forcing(nu, t, x, y);
            return std::array<double, 2>{f.x, f.y};
        };
        auto u0 = [&sol](double x, double y) {
            const Vec2 u = sol.velocity(0.0, x, y);
            return std::array<double, 2>{u.x, u.y};
        };
        auto p0 = [&sol](double x, double y) { return sol.pressure(0.0, x, y); };

        CoarseState coarse;
        coarse.u = scheme.coarse_ops().project_velocity_divfree(u0, opts.tol);
        coarse.p = l2_project_pressure(scheme.coarse_ops().space, p0, opts.tol);
        coarse.u_pred = coarse.u;
        coarse.p_pred = coarse.p;
        FineState fine;
        fine.u_curr = scheme.fine_ops().project_velocity_divfree(u0, opts.tol);
        fine.p_curr = l2_project_pressure(scheme.fine_ops().space, p0, opts.tol);

        EnergyLedger ledger;
        ledger.nu = nu;
        ledger.dt = out.dt;
        ledger.x2_u0 = scheme.coarse_ops().x_norm2(coarse.u);

        ErrorAccumulator errs(scheme.fine_ops().space, sol, nu, out.dt);
        errs.add_snapshot(0.0, fine.u_curr, fine.p_curr);

        auto record = [&](int n) {
            // invariant sweep at time level n (coarse corrector output,
            // predicted velocity in projection mode, fine CN output)
            double div = scheme.coarse_ops().div_inf_norm(coarse.u);
            if (opts.predictor_pressure == PredictorPressureMode::projection && n >= 1)
                div = std::max(div, scheme.coarse_ops().div_inf_norm(coarse.u_pred));
            div = std::max(div, scheme.fine_ops().div_inf_norm(fine.u_curr));
            out.max_div = std::max(out.max_div, div);
            EnergyBound eb;
            if (n >= 1) {
                eb = check_energy_bound(ledger, n, cfg.lambda1, cfg.energy_slack);
                out.energy_ok = out.energy_ok && eb.holds;
            }
            if (collect_trace) {
                TraceRow row;
                row.n = n;
                row.t = n * out.dt;
                row.norm_u_coarse = std::sqrt(scheme.coarse_ops().x_norm2(coarse.u));
                row.norm_u_fine = std::sqrt(scheme.fine_ops().x_norm2(fine.u_curr));
                row.div_residual = div;
                row.energy_lhs = eb.lhs;
                row.energy_rhs = eb.rhs;
                out.trace.push_back(row);
            }
            if (!detail::all_finite(fine.u_curr) || !detail::all_finite(coarse.u))
                throw SolverError("non-finite state detected (instability)");
        };
        record(0);

        scheme.coarse_stepper().step(coarse, forcing, 0.0, &ledger);
        bootstrap_first_step(scheme.fine_ops(), fine, forcing, 0.0, out.dt, opts);
        errs.add_snapshot(out.dt, fine.u_curr, fine.p_curr);
        record(1);

        for (int n = 1; n < grid.steps; ++n) {
            scheme.mcrs_step(coarse, fine, forcing, n * out.dt, &ledger);
            errs.add_snapshot((n + 1) * out.dt, fine.u_curr, fine.p_curr);
            record(n + 1);
        }

        out.e_u = errs.error_u();
        out.e_p = errs.error_p();
        out.e_gradu = errs.error_gradu();
        out.ledger = std::move(ledger);
        out.completed = true;
    } catch (const std::exception& e) {
        out.completed = false;
        out.failure = e.what();
    }
    if (cfg.timing) {
        out.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return out;
}

struct StudyResult {
    std::vector<ConvergenceRow> rows;
    std::vector<RunResult> runs;
    int exit_code = 0;
    std::string csv_path;
    std::string metadata_path;
};

inline ConvergenceRow row_from_result(const RunResult& r) {
    ConvergenceRow row;
    row.level = r.level;
    row.h = r.h;
    row.dt = r.dt;
    row.completed = r.completed;
    row.e_u = r.e_u;
    row.e_p = r.e_p;
    row.e_gradu = r.e_gradu;
    row.energy_ok = r.energy_ok;
    row.wall_seconds = r.wall_seconds;
    return row;
}

namespace detail {

inline void write_metadata(const RunConfig& cfg, const std::vector<RunResult>& runs,
                           const std::string& path) {
    std::ofstream os(path);
    os << "version=" << kVersion << "\n";
    os << "test=" << cfg.test << "\n";
    os << "nu=" << format_double(cfg.resolved_nu()) << "\n";
    os << "T=" << format_double(cfg.T) << "\n";
    os << "levels=";
    for (std::size_t i = 0; i < cfg.levels.size(); ++i)
        os << (i ? "," : "") << cfg.levels[i];
    os << "\n";
    os << "ratio=" << cfg.ratio << "\n";
    os << "dt_rule=" << cfg.dt_rule.describe() << "\n";
    os << "viscous_theta=" << format_double(cfg.viscous_theta) << "\n";
    os << "pressure_space="
       << (cfg.pressure_space == PressureSpaceKind::q1 ? "q1" : "q1_plus_q0") << "\n";
    os << "predictor_pressure="
       << (cfg.predictor_pressure == PredictorPressureMode::projection ? "projection" : "literal")
       << "\n";
    os << "bootstrap="
       << (cfg.bootstrap == BootstrapMethod::maccormack ? "maccormack" : "backward_euler") << "\n";
    os << "lambda1=" << format_double(cfg.lambda1) << "\n";
    os << "solver_tol=" << format_double(cfg.solver_tol) << "\n";
    os << "energy_slack=" << format_double(cfg.energy_slack) << "\n";
    os << "jobs=" << cfg.jobs << "\n";
    os << "timing=" << (cfg.timing ? "on" : "off") << "\n";
    for (const auto& r : runs) {
        os << "level" << r.level << ".h=" << format_double(r.h) << "\n";
        os << "level" << r.level << ".H=" << format_double(r.h * cfg.ratio) << "\n";
        os << "level" << r.level << ".dt=" << format_double(r.dt) << "\n";
        os << "level" << r.level << ".steps=" << r.steps << "\n";
        os << "level" << r.level << ".cfl_limit=" << format_double(r.cfl.limit) << "\n";
        os << "level" << r.level << ".cfl_ratio=" << format_double(r.cfl.ratio) << "\n";
        os << "level" << r.level << ".cfl_warn="
           << ((cfg.viscous_theta == 0.0 && r.cfl.ratio >= 1.0) ? 1 : 0) << "\n";
        os << "level" << r.level << ".completed=" << (r.completed ? 1 : 0) << "\n";
        if (!r.completed) os << "level" << r.level << ".failure=" << r.failure << "\n";
        os << "level" << r.level << ".max_div=" << format_double(r.max_div) << "\n";
        os << "level" << r.level << ".energy_ok=" << (r.energy_ok ? 1 : 0) << "\n";
    }
}

inline void write_trace(const RunResult& r, const std::string& path) {
    std::ofstream os(path);
    os << "n,t,norm_u_coarse,norm_u_fine,div_residual,energy_lhs,energy_rhs\n";
    for (const auto& row : r.trace)
        os << row.n << "," << format_double(row.t) << "," << format_double(row.norm_u_coarse)
           << "," << format_double(row.norm_u_fine) << "," << format_double(row.div_residual)
           << "," << format_double(row.energy_lhs) << "," << format_double(row.energy_rhs) << "\n";
}

}  // namespace detail

/// Run the level sweep and write study.csv, metadata.txt, and per-level
/// traces. Exit code 0 = clean, 1 = a level failed, 2 = an invariant
/// (divergence bound or energy monitor) was violated.
inline StudyResult run_study(const RunConfig& cfg) {
    cfg.validate();
    const auto sol = make_solution(cfg.test);
    std::filesystem::create_directories(cfg.out_dir);

    StudyResult study;
    study.runs.resize(cfg.levels.size());
    if (cfg.jobs <= 1) {
        for (std::size_t i = 0; i < cfg.levels.size(); ++i)
            study.runs[i] = run_level(cfg, *sol, cfg.levels[i], cfg.write_trace);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        const int workers = std::min<int>(cfg.jobs, static_cast<int>(cfg.levels.size()));
        for (int wkr = 0; wkr < workers; ++wkr)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < cfg.levels.size(); i = next.fetch_add(1))
                    study.runs[i] = run_level(cfg, *sol, cfg.levels[i], cfg.write_trace);
            });
        for (auto& th : pool) th.join();
    }

    for (const auto& r : study.runs) study.rows.push_back(row_from_result(r));
    fill_convergence_ratios(study.rows);

    study.csv_path = (std::filesystem::path(cfg.out_dir) / "study.csv").string();
    {
        std::ofstream os(study.csv_path);
        os << study_csv_header() << "\n";
        for (const auto& row : study.rows)
            os << study_csv_row(cfg.test, cfg.resolved_nu(), cfg.ratio, row) << "\n";
    }
    study.metadata_path = (std::filesystem::path(cfg.out_dir) / "metadata.txt").string();
    detail::write_metadata(cfg, study.runs, study.metadata_path);
    if (cfg.write_trace)
        for (const auto& r : study.runs)
            detail::write_trace(r, (std::filesystem::path(cfg.out_dir) /
                                    ("trace_level" + std::to_string(r.level) + ".csv"))
                                       .string());

    const double div_bound = 10.0 * cfg.solver_tol;
    for (const auto& r : study.runs) {
        if (!r.completed) study.exit_code = std::max(study.exit_code, 1);
        else if (!r.energy_ok || r.max_div > div_bound) study.exit_code = std::max(study.exit_code, 2);
    }
    return study;
}

}  // namespace mcrs
