// Acceptance suite: every criterion below runs at its stated tolerance and
// prints exactly one [PASS]/[FAIL] line. Exit status is the failure count.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mcrs/checks.hpp"
#include "mcrs/manufactured.hpp"
#include "mcrs/runner.hpp"
#include "mcrs/timestepping.hpp"

using namespace mcrs;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::filesystem::path work_dir() {
    auto p = std::filesystem::temp_directory_path() / "mcrs_acceptance";
    std::filesystem::create_directories(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// ---- criterion 1: property suite -----------------------------------------
void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    std::vector<CheckResult> checks;
    checks.push_back(check_skew_symmetry(8, 100, 1e-11));
    checks.push_back(check_assembly_oracle(2, 1e-12));
    checks.push_back(check_shape_gradients(1e-6));
    checks.push_back(check_quadrature_exactness(1e-14));
    checks.push_back(check_prolongation(1e-12));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = secs < 60.0;
    std::string detail = "runtime " + fmt(secs) + "s";
    for (const auto& c : checks) {
        pass = pass && c.pass;
        detail += "; " + c.name + " " + fmt(c.worst);
    }
    report(1, pass, "property suite", detail);
}

// ---- criterion 2: manufactured-solution validity --------------------------
void criterion_2() {
    bool pass = true;
    std::string detail;
    for (const char* name : {"test1", "test2"}) {
        const auto sol = make_solution(name);
        const auto v = check_manufactured_validity(*sol, 1000, 1e-12);
        const auto f = check_forcing_oracle(*sol, sol->default_viscosity(), 200, 1e-6);
        pass = pass && v.pass && f.pass;
        detail += std::string(name) + " div/bc " + fmt(v.worst) + " forcing " + fmt(f.worst) + "; ";
    }
    report(2, pass, "manufactured solutions valid", detail);
}

// ---- criteria 3-6: convergence studies + invariants ------------------------
StudyResult run_acceptance_study(const std::string& test, const std::string& out_name) {
    RunConfig cfg;
    cfg.test = test;
    cfg.levels = {8, 16, 32};
    cfg.T = 4.0;
    cfg.ratio = 2;
    cfg.viscous_theta = 0.5;
    cfg.out_dir = (work_dir() / out_name).string();
    return run_study(cfg);
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

void criterion_3(const StudyResult& study) {
    std::vector<double> e_u;
    for (const auto& r : study.rows) e_u.push_back(r.e_u);
    bool pass = study.rows.size() == 3;
    for (const auto& r : study.rows) pass = pass && r.completed;
    pass = pass && strictly_decreasing(e_u);
    std::string detail = "E_u " + fmt(e_u[0]) + " " + fmt(e_u[1]) + " " + fmt(e_u[2]);
    double min_r = 1e30, max_r = 0.0;
    for (const auto& r : study.rows)
        if (r.r_u) {
            min_r = std::min(min_r, *r.r_u);
            max_r = std::max(max_r, *r.r_u);
            detail += "; r " + fmt(*r.r_u);
        }
    pass = pass && min_r >= 1.7 && max_r <= 4.3;
    detail += max_r < 3.0 ? "; observed regime: printed-table ratio ~2"
                          : "; observed regime: second-order ratio ~4";
    report(3, pass, "test2 convergence trend, ratios in [1.7, 4.3]", detail);
}

void criterion_4(const StudyResult& study) {
    std::vector<double> e_u, e_p;
    for (const auto& r : study.rows) {
        e_u.push_back(r.e_u);
        e_p.push_back(r.e_p);
    }
    bool pass = study.rows.size() == 3;
    for (const auto& r : study.rows) pass = pass && r.completed;
    pass = pass && strictly_decreasing(e_u) && strictly_decreasing(e_p);
    // informational comparison with the published values at dt = 2^-3..2^-5
    const double published_u[3] = {0.3715, 0.1848, 0.0921};
    std::string detail = "E_u";
    for (std::size_t i = 0; i < e_u.size(); ++i)
        detail += " " + fmt(e_u[i]) + " (published " + fmt(published_u[i]) + ")";
    detail += "; E_p " + fmt(e_p[0]) + " " + fmt(e_p[1]) + " " + fmt(e_p[2]);
    report(4, pass, "test1 E_u and E_p strictly decreasing", detail);
}

void criterion_5(const StudyResult& t2, const StudyResult& t1) {
    bool pass = true;
    double worst_margin = 1e30;
    const double two_pi2 = 2.0 * std::numbers::pi * std::numbers::pi;
    for (const StudyResult* study : {&t2, &t1})
        for (const auto& run : study->runs)
            for (double lambda1 : {1.0, two_pi2})
                for (int n = 1; n <= static_cast<int>(run.ledger.steps.size()); ++n) {
                    const auto b = check_energy_bound(run.ledger, n, lambda1, 1.05);
                    pass = pass && b.holds;
                    if (b.rhs > 0.0) worst_margin = std::min(worst_margin, 1.05 * b.rhs / b.lhs);
                }
    report(5, pass, "energy bound holds each step (lambda1 = 1 and 2pi^2, slack 1.05)",
           "worst margin factor " + fmt(worst_margin));
}

void criterion_6(const StudyResult& t2, const StudyResult& t1) {
    double worst = 0.0;
    for (const StudyResult* study : {&t2, &t1})
        for (const auto& run : study->runs) worst = std::max(worst, run.max_div);
    report(6, worst <= 1e-9, "divergence residual <= 1e-9 at every stored level",
           "worst " + fmt(worst));
}

// ---- criterion 7: zero fixed point ----------------------------------------
void criterion_7() {
    const ZeroSolution sol;
    const auto hier = build_hierarchy(4, 2);
    SchemeOptions opt;
    const double dt = 0.1;
    const McrsScheme scheme(hier, 1.0, dt, opt);
    const TimeVectorField forcing = [](double, double, double) {
        return std::array<double, 2>{0.0, 0.0};
    };
    CoarseState coarse;
    coarse.u.assign(static_cast<std::size_t>(scheme.coarse_ops().space.velocity_dofs()), 0.0);
    coarse.p.assign(static_cast<std::size_t>(scheme.coarse_ops().space.pressure_dofs()), 0.0);
    coarse.u_pred = coarse.u;
    coarse.p_pred = coarse.p;
    FineState fine;
    fine.u_curr.assign(static_cast<std::size_t>(scheme.fine_ops().space.velocity_dofs()), 0.0);
    fine.p_curr.assign(static_cast<std::size_t>(scheme.fine_ops().space.pressure_dofs()), 0.0);

    EnergyLedger ledger;
    ledger.nu = 1.0;
    ledger.dt = dt;
    double worst = 0.0;
    auto track = [&] {
        worst = std::max(worst, std::sqrt(scheme.coarse_ops().x_norm2(coarse.u)));
        worst = std::max(worst, std::sqrt(scheme.fine_ops().x_norm2(fine.u_curr)));
        for (double v : coarse.p) worst = std::max(worst, std::abs(v));
        for (double v : fine.p_curr) worst = std::max(worst, std::abs(v));
    };
    scheme.coarse_stepper().step(coarse, forcing, 0.0, &ledger);
    bootstrap_first_step(scheme.fine_ops(), fine, forcing, 0.0, dt, opt);
    track();
    for (int n = 1; n < 50; ++n) {
        scheme.mcrs_step(coarse, fine, forcing, n * dt, &ledger);
        track();
    }
    report(7, worst <= 1e-13, "zero data stays zero over 50 steps", "worst norm " + fmt(worst));
}

// ---- criterion 8: bootstrap startup order ---------------------------------
void criterion_8() {
    const TrigVortexSolution sol;
    const double nu = sol.default_viscosity();
    const auto ops = LevelOperators::build(build_uniform_mesh(16), nu);
    SchemeOptions opt;
    const TimeVectorField forcing = [&sol, nu](double t, double x, double y) {
        const Vec2 f = sol.forcing(nu, t, x, y);
        return std::array<double, 2>{f.x, f.y};
    };
    auto startup_error = [&](double dt) {
        FineState st;
        st.u_curr.assign(static_cast<std::size_t>(ops.space.velocity_dofs()), 0.0);
        st.p_curr.assign(static_cast<std::size_t>(ops.space.pressure_dofs()), 0.0);
        bootstrap_first_step(ops, st, forcing, 0.0, dt, opt);
        const auto proj = ops.project_velocity(
            [&sol, dt](double x, double y) {
                const Vec2 u = sol.velocity(dt, x, y);
                return std::array<double, 2>{u.x, u.y};
            },
            1e-12);
        const auto diff = detail::axpy(1.0, st.u_curr, -1.0, proj);
        return std::sqrt(ops.x_norm2(diff));
    };
    const double e1 = startup_error(1.0 / 32.0);
    const double e2 = startup_error(1.0 / 64.0);
    const double factor = e1 / e2;
    report(8, factor >= 3.5, "bootstrap startup error drops >= 3.5x when dt halves (h = 1/16)",
           "e(1/32) " + fmt(e1) + ", e(1/64) " + fmt(e2) + ", factor " + fmt(factor));
}

// ---- criterion 9: CLI determinism ------------------------------------------
void criterion_9() {
#ifdef MCRS_CLI_PATH
    const std::string cli = MCRS_CLI_PATH;
    const auto dir_a = work_dir() / "det_a";
    const auto dir_b = work_dir() / "det_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    auto invoke = [&cli](const std::filesystem::path& out) {
        const std::string cmd = cli +
                                " study --test test2 --levels 4,8 --T 1 --timing off --out " +
                                out.string() + " > /dev/null";
        return std::system(cmd.c_str());
    };
    const int rc_a = invoke(dir_a);
    const int rc_b = invoke(dir_b);
    const std::string csv_a = slurp(dir_a / "study.csv");
    const std::string csv_b = slurp(dir_b / "study.csv");
    const bool pass = rc_a == 0 && rc_b == 0 && !csv_a.empty() && csv_a == csv_b;
    report(9, pass, "identical study invocations give byte-identical CSVs",
           "exit " + std::to_string(rc_a) + "/" + std::to_string(rc_b) + ", " +
               std::to_string(csv_a.size()) + " bytes compared");
#else
    report(9, false, "identical study invocations give byte-identical CSVs",
           "CLI path not configured");
#endif
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    const auto t2 = run_acceptance_study("test2", "study_test2");
    const auto t1 = run_acceptance_study("test1", "study_test1");
    criterion_3(t2);
    criterion_4(t1);
    criterion_5(t2, t1);
    criterion_6(t2, t1);
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures == 0) std::printf("acceptance: all criteria passed\n");
    else std::printf("acceptance: %d criteria failed\n", g_failures);
    return g_failures;
}
