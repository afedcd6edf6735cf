#pragma once

// Manufactured solutions: analytic velocity/pressure fields with the
// closed-form derivatives needed to induce the momentum forcing
//   f = u_t - nu*lap(u) + (u.grad)u + grad(p).

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mcrs {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

struct Mat2 {
    // gradient layout: g[i][j] = d u_i / d x_j
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
};

class ManufacturedSolution {
  public:
    virtual ~ManufacturedSolution() = default;

    virtual std::string name() const = 0;
    virtual double default_viscosity() const = 0;

    virtual Vec2 velocity(double t, double x, double y) const = 0;
    virtual Vec2 velocity_dt(double t, double x, double y) const = 0;
    virtual Mat2 velocity_grad(double t, double x, double y) const = 0;
    virtual Vec2 velocity_laplacian(double t, double x, double y) const = 0;
    virtual double pressure(double t, double x, double y) const = 0;
    virtual Vec2 pressure_grad(double t, double x, double y) const = 0;

    /// Momentum residual of the analytic fields.
    Vec2 forcing(double nu, double t, double x, double y) const {
        const Vec2 u = velocity(t, x, y);
        const Vec2 ut = velocity_dt(t, x, y);
        const Mat2 g = velocity_grad(t, x, y);
        const Vec2 lap = velocity_laplacian(t, x, y);
        const Vec2 gp = pressure_grad(t, x, y);
        return {ut.x - nu * lap.x + u.x * g.xx + u.y * g.xy + gp.x,
                ut.y - nu * lap.y + u.x * g.yx + u.y * g.yy + gp.y};
    }
};

/// Trigonometric vortex with a nonzero pressure; vanishes on the boundary
/// of the unit square and at t = 0.
///   u1 =  sin^2(pi x) sin(pi y) cos(pi y) sin(t)
///   u2 = -sin(pi x) cos(pi x) sin^2(pi y) sin(t)
///   p  =  sin(pi x) cos(pi x) sin(pi y) cos(pi y) sin(t)
class TrigVortexSolution final : public ManufacturedSolution {
  public:
    std::string name() const override { return "test1"; }
    double default_viscosity() const override { return 0.1; }

    Vec2 velocity(double t, double x, double y) const override {
        const double s = std::sin(t);
        return {0.5 * sq(std::sin(pi * x)) * std::sin(2.0 * pi * y) * s,
                -0.5 * std::sin(2.0 * pi * x) * sq(std::sin(pi * y)) * s};
    }
    Vec2 velocity_dt(double t, double x, double y) const override {
        const double c = std::cos(t);
        return {0.5 * sq(std::sin(pi * x)) * std::sin(2.0 * pi * y) * c,
                -0.5 * std::sin(2.0 * pi * x) * sq(std::sin(pi * y)) * c};
    }
    Mat2 velocity_grad(double t, double x, double y) const override {
        const double s = std::sin(t);
        Mat2 g;
        g.xx = 0.5 * pi * std::sin(2.0 * pi * x) * std::sin(2.0 * pi * y) * s;
        g.xy = pi * sq(std::sin(pi * x)) * std::cos(2.0 * pi * y) * s;
        g.yx = -pi * std::cos(2.0 * pi * x) * sq(std::sin(pi * y)) * s;
        g.yy = -0.5 * pi * std::sin(2.0 * pi * x) * std::sin(2.0 * pi * y) * s;
        return g;
    }
    Vec2 velocity_laplacian(double t, double x, double y) const override {
        const double s = std::sin(t);
        const double lap1 = pi * pi * (std::cos(2.0 * pi * x) - 2.0 * sq(std::sin(pi * x))) *
                            std::sin(2.0 * pi * y) * s;
        const double lap2 = pi * pi * std::sin(2.0 * pi * x) *
                            (2.0 * sq(std::sin(pi * y)) - std::cos(2.0 * pi * y)) * s;
        return {lap1, lap2};
    }
    double pressure(double t, double x, double y) const override {
        return 0.25 * std::sin(2.0 * pi * x) * std::sin(2.0 * pi * y) * std::sin(t);
    }
    Vec2 pressure_grad(double t, double x, double y) const override {
        const double s = std::sin(t);
        return {0.5 * pi * std::cos(2.0 * pi * x) * std::sin(2.0 * pi * y) * s,
                0.5 * pi * std::sin(2.0 * pi * x) * std::cos(2.0 * pi * y) * s};
    }

  private:
    static double sq(double v) { return v * v; }
    static constexpr double pi = std::numbers::pi;
};

/// Polynomial vortex with identically zero pressure, built from the stream
/// function 5 g(x) g(y) cos(t) with g(v) = v^2 (v-1)^2.
class PolynomialVortexSolution final : public ManufacturedSolution {
  public:
    std::string name() const override { return "test2"; }
    double default_viscosity() const override { return 1.0; }

    Vec2 velocity(double t, double x, double y) const override {
        const double c = std::cos(t);
        return {5.0 * g(x) * dg(y) * c, -5.0 * dg(x) * g(y) * c};
    }
    Vec2 velocity_dt(double t, double x, double y) const override {
        const double s = std::sin(t);
        return {-5.0 * g(x) * dg(y) * s, 5.0 * dg(x) * g(y) * s};
    }
    Mat2 velocity_grad(double t, double x, double y) const override {
        const double c = std::cos(t);
        Mat2 gr;
        gr.xx = 5.0 * dg(x) * dg(y) * c;
        gr.xy = 5.0 * g(x) * d2g(y) * c;
        gr.yx = -5.0 * d2g(x) * g(y) * c;
        gr.yy = -5.0 * dg(x) * dg(y) * c;
        return gr;
    }
    Vec2 velocity_laplacian(double t, double x, double y) const override {
        const double c = std::cos(t);
        return {5.0 * (d2g(x) * dg(y) + g(x) * d3g(y)) * c,
                -5.0 * (d3g(x) * g(y) + dg(x) * d2g(y)) * c};
    }
    double pressure(double, double, double) const override { return 0.0; }
    Vec2 pressure_grad(double, double, double) const override { return {0.0, 0.0}; }

  private:
    static double g(double v) { return v * v * (v - 1.0) * (v - 1.0); }
    static double dg(double v) { return 2.0 * v * (v - 1.0) * (2.0 * v - 1.0); }
    static double d2g(double v) { return 12.0 * v * v - 12.0 * v + 2.0; }
    static double d3g(double v) { return 24.0 * v - 12.0; }
};

/// Identically zero fields; gives f = 0 and exercises the zero fixed point.
class ZeroSolution final : public ManufacturedSolution {
  public:
    std::string name() const override { return "zero"; }
    double default_viscosity() const override { return 1.0; }
    Vec2 velocity(double, double, double) const override { return {}; }
    Vec2 velocity_dt(double, double, double) const override { return {}; }
    Mat2 velocity_grad(double, double, double) const override { return {}; }
    Vec2 velocity_laplacian(double, double, double) const override { return {}; }
    double pressure(double, double, double) const override { return 0.0; }
    Vec2 pressure_grad(double, double, double) const override { return {0.0, 0.0}; }
};

inline std::unique_ptr<ManufacturedSolution> make_solution(const std::string& name) {
    if (name == "test1") return std::make_unique<TrigVortexSolution>();
    if (name == "test2") return std::make_unique<PolynomialVortexSolution>();
    if (name == "zero") return std::make_unique<ZeroSolution>();
    throw std::invalid_argument("unknown manufactured solution: " + name);
}

/// Forcing recomputed from central differences of the primitive fields
/// only; cross-checks the hard-coded derivative closures.
inline Vec2 finite_difference_forcing(const ManufacturedSolution& sol, double nu, double t,
                                      double x, double y, double step = 1e-4) {
    auto u = [&](double tt, double xx, double yy) { return sol.velocity(tt, xx, yy); };
    const Vec2 up_t = u(t + step, x, y), um_t = u(t - step, x, y);
    const Vec2 up_x = u(t, x + step, y), um_x = u(t, x - step, y);
    const Vec2 up_y = u(t, x, y + step), um_y = u(t, x, y - step);
    const Vec2 uc = u(t, x, y);
    const Vec2 ut{(up_t.x - um_t.x) / (2 * step), (up_t.y - um_t.y) / (2 * step)};
    const Vec2 ux{(up_x.x - um_x.x) / (2 * step), (up_x.y - um_x.y) / (2 * step)};
    const Vec2 uy{(up_y.x - um_y.x) / (2 * step), (up_y.y - um_y.y) / (2 * step)};
    const Vec2 lap{(up_x.x - 2 * uc.x + um_x.x) / (step * step) +
                       (up_y.x - 2 * uc.x + um_y.x) / (step * step),
                   (up_x.y - 2 * uc.y + um_x.y) / (step * step) +
                       (up_y.y - 2 * uc.y + um_y.y) / (step * step)};
    const double px = (sol.pressure(t, x + step, y) - sol.pressure(t, x - step, y)) / (2 * step);
    const double py = (sol.pressure(t, x, y + step) - sol.pressure(t, x, y - step)) / (2 * step);
    return {ut.x - nu * lap.x + uc.x * ux.x + uc.y * uy.x + px,
            ut.y - nu * lap.y + uc.x * ux.y + uc.y * uy.y + py};
}

}  // namespace mcrs
