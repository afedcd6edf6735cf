#pragma once

// Time integration: the explicit/semi-implicit MacCormack predictor-
// corrector on the coarse grid, the three-level Crank-Nicolson step on the
// fine grid fed by the prolongated coarse convection, the startup step,
// and the discrete energy monitor.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcrs/assembly.hpp"
#include "mcrs/mesh.hpp"
#include "mcrs/solver.hpp"
#include "mcrs/space.hpp"
#include "mcrs/sparse.hpp"

namespace mcrs {

using TimeVectorField = std::function<std::array<double, 2>(double, double, double)>;

/// Uniform time grid with N*dt = T (up to roundoff).
struct TimeGrid {
    double dt = 0.0;
    double T = 0.0;
    int steps = 0;

    TimeGrid(double dt_, double T_) : dt(dt_), T(T_) {
        if (dt <= 0.0 || T <= 0.0) throw std::invalid_argument("TimeGrid: dt and T must be positive");
        steps = static_cast<int>(std::llround(T / dt));
        if (steps < 1 || std::abs(steps * dt - T) > 16.0 * std::numeric_limits<double>::epsilon() * T)
            throw std::invalid_argument("TimeGrid: T must be an integer multiple of dt");
    }
};

struct CflDiagnostic {
    double limit = 0.0;  // explicit-diffusion heuristic H^2/(4 nu)
    double ratio = 0.0;  // dt / limit; warn when >= 1 in the explicit variant
};

inline CflDiagnostic cfl_diagnostic(double spacing, double nu, double dt) {
    if (spacing <= 0.0 || nu <= 0.0 || dt <= 0.0)
        throw std::invalid_argument("cfl_diagnostic: inputs must be positive");
    CflDiagnostic d;
    d.limit = spacing * spacing / (4.0 * nu);
    d.ratio = dt / d.limit;
    return d;
}

/// Per-step norms feeding the discrete energy bound: X-norms squared of
/// the current and predicted velocities, their W-norms squared
/// (nu * ||grad .||^2), and the forcing L2 norms squared at the step and
/// predicted-step times.
struct EnergyStepRecord {
    double x2_u = 0.0;
    double w2_u = 0.0;
    double x2_pred = 0.0;
    double w2_pred = 0.0;
    double f2_n = 0.0;
    double f2_mid = 0.0;
    double x2_next = 0.0;
};

struct EnergyLedger {
    double nu = 0.0;
    double dt = 0.0;
    double x2_u0 = 0.0;
    std::vector<EnergyStepRecord> steps;
};

struct EnergyBound {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Evaluate the stability bound
///   3||u^N||_X^2 + ||u^{pred N}||_X^2
///     + 2 nu dt sum_{n<N} (||u^n||_W^2 + ||u^{pred n+1}||_W^2)
///   <= (2 dt / (lambda1 nu^2)) sum_{n<N} (||f^{pred n+1}||_X^2 + ||f^n||_X^2)
///     + 4||u^0||_X^2
/// at step N from the ledger. The derivation drops an O(dt) remainder, so
/// the check carries a multiplicative slack.
inline EnergyBound check_energy_bound(const EnergyLedger& ledger, int n_steps, double lambda1,
                                      double slack = 1.05) {
    if (n_steps < 1 || n_steps > static_cast<int>(ledger.steps.size()))
        throw std::invalid_argument("check_energy_bound: ledger incomplete for requested step");
    double dissip = 0.0, force = 0.0;
    for (int n = 0; n < n_steps; ++n) {
        const auto& r = ledger.steps[static_cast<std::size_t>(n)];
        dissip += r.w2_u + r.w2_pred;
        force += r.f2_mid + r.f2_n;
    }
    const auto& last = ledger.steps[static_cast<std::size_t>(n_steps - 1)];
    EnergyBound b;
    b.lhs = 3.0 * last.x2_next + last.x2_pred + 2.0 * ledger.nu * ledger.dt * dissip;
    b.rhs = 2.0 * ledger.dt / (lambda1 * ledger.nu * ledger.nu) * force + 4.0 * ledger.x2_u0;
    b.holds = b.lhs <= slack * b.rhs;
    return b;
}

/// Assembled operators for one mesh level.
struct LevelOperators {
    MixedSpace space;
    double nu = 0.0;
    CsrMatrix mass;        // velocity (u, v)
    CsrMatrix stiffness;   // nu (grad u, grad v)
    CsrMatrix divergence;  // (q, div u)
    CsrMatrix scalar_mass;
    std::optional<SpdSolver> scalar_mass_solver;
    std::optional<SaddleSolver> mass_saddle;  // constrained projections

    static LevelOperators build(const QuadMesh& mesh, double nu,
                                PressureSpaceKind kind = PressureSpaceKind::q1) {
        LevelOperators ops;
        ops.space = make_mixed_space(mesh, kind);
        ops.nu = nu;
        ops.mass = assemble_mass(ops.space);
        ops.stiffness = assemble_stiffness(ops.space, nu);
        ops.divergence = assemble_divergence(ops.space);
        ops.scalar_mass = assemble_scalar_mass(mesh, ElementFamily::q2);
        ops.scalar_mass_solver.emplace(ops.scalar_mass);
        ops.mass_saddle.emplace(ops.mass, ops.divergence, ops.space.pressure_gauge,
                                ops.space.dirichlet_mask);
        return ops;
    }

    double x_norm2(std::span<const double> u) const { return mass.quadratic_form(u, u); }
    double w_norm2(std::span<const double> u) const { return stiffness.quadratic_form(u, u); }
    double div_inf_norm(std::span<const double> u) const {
        const auto r = divergence.apply(u);
        double worst = 0.0;
        for (double v : r) worst = std::max(worst, std::abs(v));
        return worst;
    }
    std::vector<double> project_velocity(const VectorField& f, double tol) const {
        return l2_project_velocity(space, f, *scalar_mass_solver, tol);
    }

    /// L2 projection constrained to the discretely divergence-free
    /// subspace; this is what time-level-0 states are built from, so the
    /// stored-velocity divergence invariant holds from the start even when
    /// the initial field's plain projection leaves V_h.
    std::vector<double> project_velocity_divfree(const VectorField& f, double tol) const {
        const auto load = assemble_velocity_load(space, f);
        const std::vector<double> zero_c(static_cast<std::size_t>(space.pressure_dofs()), 0.0);
        return mass_saddle->solve(load, zero_c, tol).velocity;
    }
};

/// u_H^n, p_H^n together with the predicted pair; at n = 0 the predicted
/// fields coincide with the current ones.
struct CoarseState {
    std::vector<double> u, p;
    std::vector<double> u_pred, p_pred;
    int n = 0;
};

/// Fine-grid history for the three-level Crank-Nicolson step.
struct FineState {
    std::vector<double> u_prev, u_curr;
    std::vector<double> p_prev, p_curr;
    int n = 0;
};

enum class PredictorPressureMode { projection, literal };
enum class BootstrapMethod { maccormack, backward_euler };

struct SchemeOptions {
    double theta = 0.5;  // viscous weighting: 0 = fully explicit, 0.5 = averaged
    PredictorPressureMode predictor_pressure = PredictorPressureMode::projection;
    BootstrapMethod bootstrap = BootstrapMethod::maccormack;
    double tol = 1e-10;
};

namespace detail {

inline std::vector<double> axpy(double a, const std::vector<double>& x, double b,
                                const std::vector<double>& y) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
    return out;
}

inline void add_scaled(std::vector<double>& target, double a, const std::vector<double>& x) {
    for (std::size_t i = 0; i < target.size(); ++i) target[i] += a * x[i];
}

}  // namespace detail

inline VectorField bind_time(const TimeVectorField& f, double t) {
    return [&f, t](double x, double y) { return f(t, x, y); };
}

/// Predictor-corrector advance of the coarse velocity/pressure pair.
///
/// Predictor (time level n -> predicted level):
///   M (u_pred - u^n)/dt + theta A u_pred + (1-theta) A u^n
///     + N(u^n) u^n - B^T p = F(t^n),  B u_pred = 0
/// In `literal` mode the known p^n replaces the multiplier and the
/// predicted velocity is left unprojected, exactly as the explicit scheme
/// is written.
///
/// Corrector (predicted level -> n+1):
///   2M/dt (u^{n+1} - (u_pred + u^n)/2)
///     + theta A (u^{n+1} + u^n) + (1-2 theta) A u_pred
///     + N(u_pred) u_pred - B^T p = F(t^n + dt/2),  B u^{n+1} = 0.
/// At theta = 0 this is the literal explicit corrector (viscous term at the
/// predicted level); at theta = 1/2 the average pairs levels n and n+1,
/// which keeps second-order consistency and removes the diffusion step
/// limit.
class MacCormackStepper {
  public:
    MacCormackStepper(const LevelOperators& ops, double dt, const SchemeOptions& opt)
        : ops_(&ops), dt_(dt), opt_(opt), convection_(ops.space) {
        auto kp = csr_add(1.0 / dt, ops.mass, opt.theta, ops.stiffness);
        auto kc = csr_add(2.0 / dt, ops.mass, opt.theta, ops.stiffness);
        if (opt.predictor_pressure == PredictorPressureMode::projection) {
            predictor_saddle_.emplace(kp, ops.divergence, ops.space.pressure_gauge,
                                      ops.space.dirichlet_mask);
        } else {
            std::vector<double> dummy(static_cast<std::size_t>(kp.rows()), 0.0);
            apply_dirichlet(kp, dummy, ops.space.dirichlet_mask);
            predictor_spd_.emplace(kp);
        }
        corrector_saddle_.emplace(kc, ops.divergence, ops.space.pressure_gauge,
                                  ops.space.dirichlet_mask);
    }

    /// Predictor solve: writes (u_pred, p_pred) from the level-n fields.
    void predict(CoarseState& st, const TimeVectorField& forcing, double t) const {
        const auto& ops = *ops_;
        const auto conv_n = convection_.apply(st.u, st.u);
        auto rhs = ops.mass.apply(st.u);
        for (auto& v : rhs) v /= dt_;
        detail::add_scaled(rhs, -(1.0 - opt_.theta), ops.stiffness.apply(st.u));
        detail::add_scaled(rhs, -1.0, conv_n);
        detail::add_scaled(rhs, 1.0, assemble_velocity_load(ops.space, bind_time(forcing, t)));
        if (predictor_saddle_) {
            const std::vector<double> zero_c(static_cast<std::size_t>(ops.space.pressure_dofs()), 0.0);
            auto res = predictor_saddle_->solve(rhs, zero_c, opt_.tol);
            st.u_pred = std::move(res.velocity);
            st.p_pred = std::move(res.pressure);
        } else {
            detail::add_scaled(rhs, 1.0, ops.divergence.apply_transpose(st.p));
            for (int i = 0; i < ops.space.velocity_dofs(); ++i)
                if (ops.space.dirichlet_mask[static_cast<std::size_t>(i)]) rhs[static_cast<std::size_t>(i)] = 0.0;
            st.u_pred = predictor_spd_->solve(rhs, opt_.tol);
            st.p_pred = st.p;
        }
    }

    /// Corrector solve: combines (u^n, u_pred) into u^{n+1}; the returned
    /// multiplier is the predicted-level pressure, also adopted as p^{n+1}.
    void correct(CoarseState& st, const TimeVectorField& forcing, double t) const {
        const auto& ops = *ops_;
        const auto conv_p = convection_.apply(st.u_pred, st.u_pred);
        auto rhs = ops.mass.apply(detail::axpy(1.0, st.u_pred, 1.0, st.u));
        for (auto& v : rhs) v /= dt_;
        detail::add_scaled(rhs, -opt_.theta, ops.stiffness.apply(st.u));
        detail::add_scaled(rhs, -(1.0 - 2.0 * opt_.theta), ops.stiffness.apply(st.u_pred));
        detail::add_scaled(rhs, -1.0, conv_p);
        detail::add_scaled(rhs, 1.0,
                           assemble_velocity_load(ops.space, bind_time(forcing, t + 0.5 * dt_)));
        const std::vector<double> zero_c(static_cast<std::size_t>(ops.space.pressure_dofs()), 0.0);
        auto res = corrector_saddle_->solve(rhs, zero_c, opt_.tol);
        st.u = std::move(res.velocity);
        st.p = res.pressure;
        st.p_pred = std::move(res.pressure);
        st.n += 1;
    }

    /// Advance one step; forcing is sampled at t and t + dt/2.
    void step(CoarseState& st, const TimeVectorField& forcing, double t,
              EnergyLedger* ledger = nullptr) const {
        const auto& ops = *ops_;
        EnergyStepRecord rec;
        if (ledger) {
            rec.x2_u = ops.x_norm2(st.u);
            rec.w2_u = ops.w_norm2(st.u);
            const double fn = vector_field_l2_norm(ops.space.mesh, bind_time(forcing, t));
            const double fm = vector_field_l2_norm(ops.space.mesh, bind_time(forcing, t + 0.5 * dt_));
            rec.f2_n = fn * fn;
            rec.f2_mid = fm * fm;
        }
        predict(st, forcing, t);
        if (ledger) {
            rec.x2_pred = ops.x_norm2(st.u_pred);
            rec.w2_pred = ops.w_norm2(st.u_pred);
        }
        correct(st, forcing, t);
        if (ledger) {
            rec.x2_next = ops.x_norm2(st.u);
            ledger->steps.push_back(rec);
        }
    }

  private:
    const LevelOperators* ops_;
    double dt_;
    SchemeOptions opt_;
    mutable ConvectionOperator convection_;
    std::optional<SaddleSolver> predictor_saddle_;
    std::optional<SpdSolver> predictor_spd_;
    std::optional<SaddleSolver> corrector_saddle_;
};

/// Three-level Crank-Nicolson step on the fine grid:
///   M (u^{n+1} - u^{n-1})/(2 dt) + A (u^{n+1} + u^{n-1})/2
///     + N(w) w - B^T pbar = F(t^{n+1}),
///   B (u^{n+1} + u^{n-1})/2 = 0,
/// where w is the prolongated coarse velocity at level n and
/// pbar = (p^{n+1} + p^{n-1})/2, from which p^{n+1} is recovered.
class CrankNicolsonStepper {
  public:
    CrankNicolsonStepper(const LevelOperators& ops, double dt, double tol)
        : ops_(&ops), dt_(dt), tol_(tol), convection_(ops.space) {
        auto k = csr_add(0.5 / dt, ops.mass, 0.5, ops.stiffness);
        solver_.emplace(k, ops.divergence, ops.space.pressure_gauge, ops.space.dirichlet_mask);
    }

    void step(FineState& st, std::span<const double> coarse_velocity_on_fine,
              const TimeVectorField& forcing, double t_next) const {
        if (st.n < 1)
            throw std::logic_error("CrankNicolsonStepper: history not bootstrapped (n must be >= 1)");
        const auto& ops = *ops_;
        const auto conv = convection_.apply(coarse_velocity_on_fine, coarse_velocity_on_fine);
        auto rhs = ops.mass.apply(st.u_prev);
        for (auto& v : rhs) v *= 0.5 / dt_;
        detail::add_scaled(rhs, -0.5, ops.stiffness.apply(st.u_prev));
        detail::add_scaled(rhs, -1.0, conv);
        detail::add_scaled(rhs, 1.0,
                           assemble_velocity_load(ops.space, [&forcing, t_next](double x, double y) {
                               return forcing(t_next, x, y);
                           }));
        auto rhs_c = ops.divergence.apply(st.u_prev);
        for (auto& v : rhs_c) v = -v;
        auto res = solver_->solve(rhs, rhs_c, tol_);
        auto p_next = detail::axpy(2.0, res.pressure, -1.0, st.p_prev);
        st.u_prev = std::move(st.u_curr);
        st.u_curr = std::move(res.velocity);
        st.p_prev = std::move(st.p_curr);
        st.p_curr = std::move(p_next);
        st.n += 1;
    }

  private:
    const LevelOperators* ops_;
    double dt_;
    double tol_;
    mutable ConvectionOperator convection_;
    std::optional<SaddleSolver> solver_;
};

/// Startup: produce the level-1 pair on the fine grid (the scheme needs
/// u^0 and u^1 before the three-level step can run). Default is one
/// MacCormack predictor-corrector step on the fine grid; the alternative
/// is two backward-Euler half steps with explicit convection.
inline void bootstrap_first_step(const LevelOperators& fine_ops, FineState& fine,
                                 const TimeVectorField& forcing, double t0, double dt,
                                 const SchemeOptions& opt) {
    if (fine.n != 0) throw std::logic_error("bootstrap_first_step: fine state must be at n = 0");
    if (opt.bootstrap == BootstrapMethod::maccormack) {
        CoarseState tmp;
        tmp.u = fine.u_curr;
        tmp.p = fine.p_curr;
        tmp.u_pred = tmp.u;
        tmp.p_pred = tmp.p;
        MacCormackStepper stepper(fine_ops, dt, opt);
        stepper.step(tmp, forcing, t0, nullptr);
        fine.u_prev = fine.u_curr;
        fine.p_prev = fine.p_curr;
        fine.u_curr = std::move(tmp.u);
        fine.p_curr = std::move(tmp.p);
    } else {
        const double half = 0.5 * dt;
        auto k = csr_add(1.0 / half, fine_ops.mass, 1.0, fine_ops.stiffness);
        SaddleSolver solver(k, fine_ops.divergence, fine_ops.space.pressure_gauge,
                            fine_ops.space.dirichlet_mask);
        const std::vector<double> zero_c(static_cast<std::size_t>(fine_ops.space.pressure_dofs()), 0.0);
        std::vector<double> u = fine.u_curr;
        std::vector<double> p;
        for (int sub = 1; sub <= 2; ++sub) {
            const double t_new = t0 + sub * half;
            auto rhs = fine_ops.mass.apply(u);
            for (auto& v : rhs) v /= half;
            detail::add_scaled(rhs, -1.0, assemble_convection(fine_ops.space, u).apply(u));
            detail::add_scaled(rhs, 1.0,
                               assemble_velocity_load(fine_ops.space, [&forcing, t_new](double x, double y) {
                                   return forcing(t_new, x, y);
                               }));
            auto res = solver.solve(rhs, zero_c, opt.tol);
            u = std::move(res.velocity);
            p = std::move(res.pressure);
        }
        fine.u_prev = fine.u_curr;
        fine.p_prev = fine.p_curr;
        fine.u_curr = std::move(u);
        fine.p_curr = std::move(p);
    }
    fine.n = 1;
}

/// The coupled two-level scheme: one MacCormack advance on the coarse
/// grid, then one fine Crank-Nicolson step whose convection is frozen at
/// the prolongated coarse velocity of the current level.
class McrsScheme {
  public:
    McrsScheme(const TwoLevelHierarchy& hier, double nu, double dt, const SchemeOptions& opt,
               PressureSpaceKind pressure_kind = PressureSpaceKind::q1)
        : hier_(&hier),
          coarse_ops_(LevelOperators::build(hier.coarse, nu, pressure_kind)),
          fine_ops_(LevelOperators::build(hier.fine, nu, pressure_kind)),
          coarse_stepper_(coarse_ops_, dt, opt),
          fine_stepper_(fine_ops_, dt, opt.tol),
          dt_(dt),
          opt_(opt) {}

    const LevelOperators& coarse_ops() const { return coarse_ops_; }
    const LevelOperators& fine_ops() const { return fine_ops_; }
    const MacCormackStepper& coarse_stepper() const { return coarse_stepper_; }
    const CrankNicolsonStepper& fine_stepper() const { return fine_stepper_; }
    double dt() const { return dt_; }
    const SchemeOptions& options() const { return opt_; }

    /// Advance both levels from step index n to n+1 (n >= 1).
    void mcrs_step(CoarseState& coarse, FineState& fine, const TimeVectorField& forcing, double t,
                   EnergyLedger* ledger) const {
        if (coarse.n != fine.n) throw std::logic_error("mcrs_step: states at different step indices");
        const std::vector<double> coarse_u_n = coarse.u;  // level-n velocity feeds the fine convection
        coarse_stepper_.step(coarse, forcing, t, ledger);
        const auto w = prolongate_velocity(*hier_, coarse_u_n);
        fine_stepper_.step(fine, w, forcing, t + dt_);
    }

  private:
    const TwoLevelHierarchy* hier_;
    LevelOperators coarse_ops_;
    LevelOperators fine_ops_;
    MacCormackStepper coarse_stepper_;
    CrankNicolsonStepper fine_stepper_;
    double dt_;
    SchemeOptions opt_;
};

}  // namespace mcrs
