#pragma once

// Discrete error norms against a manufactured solution and the
// convergence-study bookkeeping (ratios r = E(2h)/E(h), theta = log2 r).

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcrs/element.hpp"
#include "mcrs/manufactured.hpp"
#include "mcrs/space.hpp"

namespace mcrs {

/// Incremental accumulator for the time-discrete error norms
///   E(u)      = [dt sum_n ||u^n - u_h^n||^2]^(1/2)
///   E(grad u) = [nu dt sum_n ||grad(u^n - u_h^n)||^2]^(1/2)
///   E(p)      = [dt sum_n ||p^n - p_h^n||^2]^(1/2)
/// with the exact solution evaluated at the assembly quadrature points.
/// Snapshots are folded in step by step; no history is retained.
class ErrorAccumulator {
  public:
    ErrorAccumulator(const MixedSpace& space, const ManufacturedSolution& sol, double nu, double dt)
        : space_(&space), sol_(&sol), nu_(nu), dt_(dt) {}

    void add_snapshot(double t, std::span<const double> u_coeffs, std::span<const double> p_coeffs) {
        const auto& rule = QuadratureRule::gauss3x3();
        static const ShapeTable vtab(ElementFamily::q2, QuadratureRule::gauss3x3());
        static const ShapeTable ptab(ElementFamily::q1, QuadratureRule::gauss3x3());
        const QuadMesh& mesh = space_->mesh;
        const int vs = space_->velocity_scalar.dofs();
        const double det_j = mesh.spacing * mesh.spacing / 4.0;
        const double jinv = 2.0 / mesh.spacing;
        std::array<int, 9> vdofs{};
        std::array<int, 4> pdofs{};
        double su = 0.0, sg = 0.0, sp = 0.0;
        for (int e = 0; e < mesh.element_count(); ++e) {
            space_->velocity_scalar.element_dofs(e, vdofs);
            space_->pressure_q1.element_dofs(e, pdofs);
            const auto origin = mesh.cell_origin(e);
            for (int q = 0; q < rule.size(); ++q) {
                const double w = rule.weights[static_cast<std::size_t>(q)] * det_j;
                const auto& pt = rule.points[static_cast<std::size_t>(q)];
                const double x = origin[0] + 0.5 * (pt[0] + 1.0) * mesh.spacing;
                const double y = origin[1] + 0.5 * (pt[1] + 1.0) * mesh.spacing;
                double uhx = 0.0, uhy = 0.0, gxx = 0.0, gxy = 0.0, gyx = 0.0, gyy = 0.0;
                for (int i = 0; i < 9; ++i) {
                    const int g = vdofs[static_cast<std::size_t>(i)];
                    const double cv = u_coeffs[static_cast<std::size_t>(g)];
                    const double cw = u_coeffs[static_cast<std::size_t>(vs + g)];
                    const double val = vtab.values[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
                    const auto& gr = vtab.grads[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
                    uhx += cv * val;
                    uhy += cw * val;
                    gxx += cv * gr[0] * jinv;
                    gxy += cv * gr[1] * jinv;
                    gyx += cw * gr[0] * jinv;
                    gyy += cw * gr[1] * jinv;
                }
                double ph = 0.0;
                for (int i = 0; i < 4; ++i)
                    ph += p_coeffs[static_cast<std::size_t>(pdofs[static_cast<std::size_t>(i)])] *
                          ptab.values[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
                if (space_->pressure_q0)
                    ph += p_coeffs[static_cast<std::size_t>(space_->q0_offset() + e)];
                const Vec2 ue = sol_->velocity(t, x, y);
                const Mat2 ge = sol_->velocity_grad(t, x, y);
                const double pe = sol_->pressure(t, x, y);
                su += w * ((ue.x - uhx) * (ue.x - uhx) + (ue.y - uhy) * (ue.y - uhy));
                sg += w * ((ge.xx - gxx) * (ge.xx - gxx) + (ge.xy - gxy) * (ge.xy - gxy) +
                           (ge.yx - gyx) * (ge.yx - gyx) + (ge.yy - gyy) * (ge.yy - gyy));
                sp += w * (pe - ph) * (pe - ph);
            }
        }
        sum_u_ += su;
        sum_gradu_ += sg;
        sum_p_ += sp;
        ++snapshots_;
    }

    int snapshots() const { return snapshots_; }
    double error_u() const { return std::sqrt(dt_ * sum_u_); }
    double error_gradu() const { return std::sqrt(nu_ * dt_ * sum_gradu_); }
    double error_p() const { return std::sqrt(dt_ * sum_p_); }

  private:
    const MixedSpace* space_;
    const ManufacturedSolution* sol_;
    double nu_;
    double dt_;
    double sum_u_ = 0.0;
    double sum_gradu_ = 0.0;
    double sum_p_ = 0.0;
    int snapshots_ = 0;
};

/// One level of a convergence study. Ratio fields are empty on the first
/// row and on rows following a failed level.
struct ConvergenceRow {
    int level = 0;  // fine cells per side
    double h = 0.0;
    double dt = 0.0;
    bool completed = false;
    double e_u = 0.0, e_p = 0.0, e_gradu = 0.0;
    std::optional<double> r_u, r_p, r_gradu;
    std::optional<double> theta_u, theta_p, theta_gradu;
    bool energy_ok = false;
    double wall_seconds = 0.0;
};

/// Fill ratio/order columns from consecutive completed rows.
inline void fill_convergence_ratios(std::vector<ConvergenceRow>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!rows[i].completed || !rows[i - 1].completed) continue;
        auto set = [](double prev, double cur, std::optional<double>& r, std::optional<double>& th) {
            if (cur <= 0.0 || prev <= 0.0) return;
            r = prev / cur;
            th = std::log2(*r);
        };
        set(rows[i - 1].e_u, rows[i].e_u, rows[i].r_u, rows[i].theta_u);
        set(rows[i - 1].e_p, rows[i].e_p, rows[i].r_p, rows[i].theta_p);
        set(rows[i - 1].e_gradu, rows[i].e_gradu, rows[i].r_gradu, rows[i].theta_gradu);
    }
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline const char* study_csv_header() {
    return "test,nu,ratio,level,h,dt,E_u,r_u,theta_u,E_p,r_p,theta_p,E_gradu,r_gradu,theta_gradu,"
           "energy_ok,wall_seconds";
}

inline std::string study_csv_row(const std::string& test, double nu, int ratio,
                                 const ConvergenceRow& row) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::string s;
    s += test + "," + format_double(nu) + "," + std::to_string(ratio) + "," +
         std::to_string(row.level) + "," + format_double(row.h) + "," + format_double(row.dt) + ",";
    if (row.completed) {
        s += format_double(row.e_u) + "," + opt(row.r_u) + "," + opt(row.theta_u) + "," +
             format_double(row.e_p) + "," + opt(row.r_p) + "," + opt(row.theta_p) + "," +
             format_double(row.e_gradu) + "," + opt(row.r_gradu) + "," + opt(row.theta_gradu) + ",";
    } else {
        s += ",,,,,,,,,";  // failed level: error fields left empty
    }
    s += std::string(row.energy_ok ? "1" : "0") + "," + format_double(row.wall_seconds);
    return s;
}

}  // namespace mcrs
