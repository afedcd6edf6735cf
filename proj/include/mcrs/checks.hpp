#pragma once

// Self-contained property checks shared by the `check` CLI verb, the unit
// suites, and the acceptance harness: trilinear skew-symmetry, sparse
// assembly against the dense oracle, shape-gradient finite differences,
// quadrature exactness, prolongation reproduction, and manufactured-
// solution validity.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mcrs/assembly.hpp"
#include "mcrs/dense_check.hpp"
#include "mcrs/manufactured.hpp"
#include "mcrs/mesh.hpp"
#include "mcrs/space.hpp"

namespace mcrs {

struct CheckResult {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    double bound = 0.0;

    std::string describe() const {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: worst %.3e (bound %.3e)", name.c_str(), worst, bound);
        return buf;
    }
};

inline std::vector<double> random_vector(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

/// |v^T N(w) v| <= bound * ||v||^2 over random coefficient pairs.
inline CheckResult check_skew_symmetry(int n = 8, int samples = 100, double bound = 1e-11,
                                       unsigned seed = 20240901) {
    const auto space = make_mixed_space(build_uniform_mesh(n));
    std::mt19937 rng(seed);
    CheckResult r{"trilinear skew-symmetry", false, 0.0, bound};
    for (int s = 0; s < samples; ++s) {
        const auto w = random_vector(rng, static_cast<std::size_t>(space.velocity_dofs()));
        const auto v = random_vector(rng, static_cast<std::size_t>(space.velocity_dofs()));
        const auto nmat = assemble_convection(space, w);
        double v2 = 0.0;
        for (double x : v) v2 += x * x;
        r.worst = std::max(r.worst, std::abs(nmat.quadratic_form(v, v)) / v2);
    }
    r.pass = r.worst <= bound;
    return r;
}

/// Entrywise agreement of sparse M, A, B, N(w) with the dense oracle.
inline CheckResult check_assembly_oracle(int n = 2, double bound = 1e-12,
                                         unsigned seed = 20240902) {
    const auto space = make_mixed_space(build_uniform_mesh(n));
    std::mt19937 rng(seed);
    const auto w = random_vector(rng, static_cast<std::size_t>(space.velocity_dofs()));
    CheckResult r{"assembly vs dense oracle", false, 0.0, bound};
    r.worst = std::max(r.worst, dense_check::max_abs_diff(dense_check::mass(space), assemble_mass(space)));
    r.worst = std::max(r.worst, dense_check::max_abs_diff(dense_check::stiffness(space, 0.37),
                                                          assemble_stiffness(space, 0.37)));
    r.worst = std::max(r.worst, dense_check::max_abs_diff(dense_check::divergence(space),
                                                          assemble_divergence(space)));
    r.worst = std::max(r.worst, dense_check::max_abs_diff(dense_check::convection(space, w),
                                                          assemble_convection(space, w)));
    r.pass = r.worst <= bound;
    return r;
}

/// Central finite differences of the reference shape functions.
inline CheckResult check_shape_gradients(double bound = 1e-6) {
    CheckResult r{"shape gradient finite differences", false, 0.0, bound};
    const double step = 1e-6;
    const std::vector<std::array<double, 2>> pts{
        {0.0, 0.0}, {0.3, -0.7}, {-0.55, 0.2}, {0.9, 0.9}, {-0.9, 0.4}};
    for (ElementFamily fam : {ElementFamily::q0, ElementFamily::q1, ElementFamily::q2}) {
        const ReferenceElement elem{fam};
        const int nd = elem.dof_count();
        std::vector<double> vp(static_cast<std::size_t>(nd)), vm(static_cast<std::size_t>(nd));
        std::vector<std::array<double, 2>> g(static_cast<std::size_t>(nd));
        for (const auto& p : pts) {
            elem.grad(p[0], p[1], g);
            elem.eval(p[0] + step, p[1], vp);
            elem.eval(p[0] - step, p[1], vm);
            for (int i = 0; i < nd; ++i)
                r.worst = std::max(r.worst, std::abs((vp[static_cast<std::size_t>(i)] - vm[static_cast<std::size_t>(i)]) / (2 * step) -
                                                     g[static_cast<std::size_t>(i)][0]));
            elem.eval(p[0], p[1] + step, vp);
            elem.eval(p[0], p[1] - step, vm);
            for (int i = 0; i < nd; ++i)
                r.worst = std::max(r.worst, std::abs((vp[static_cast<std::size_t>(i)] - vm[static_cast<std::size_t>(i)]) / (2 * step) -
                                                     g[static_cast<std::size_t>(i)][1]));
        }
    }
    r.pass = r.worst <= bound;
    return r;
}

/// The 3x3 Gauss rule integrates x^4 y^4 over a physical cell exactly.
inline CheckResult check_quadrature_exactness(double bound = 1e-14) {
    CheckResult r{"quadrature exactness on x^4 y^4", false, 0.0, bound};
    const auto mesh = build_uniform_mesh(4);
    const auto& rule = QuadratureRule::gauss3x3();
    auto mono5 = [](double a, double b) { return (std::pow(b, 5) - std::pow(a, 5)) / 5.0; };
    for (int e : {0, 5, 10, 15}) {
        const auto o = mesh.cell_origin(e);
        const double h = mesh.spacing;
        double acc = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
            const auto& pt = rule.points[static_cast<std::size_t>(q)];
            const double x = o[0] + 0.5 * (pt[0] + 1.0) * h;
            const double y = o[1] + 0.5 * (pt[1] + 1.0) * h;
            acc += rule.weights[static_cast<std::size_t>(q)] * (h * h / 4.0) *
                   std::pow(x, 4) * std::pow(y, 4);
        }
        const double exact = mono5(o[0], o[0] + h) * mono5(o[1], o[1] + h);
        r.worst = std::max(r.worst, std::abs(acc - exact) / std::abs(exact));
    }
    r.pass = r.worst <= bound;
    return r;
}

/// Prolongation reproduces coarse-space functions at random interior points.
inline CheckResult check_prolongation(double bound = 1e-12, unsigned seed = 20240903) {
    CheckResult r{"prolongation reproduces coarse space", false, 0.0, bound};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> interior(0.05, 0.95);
    for (int ratio : {2, 3}) {
        const auto hier = build_hierarchy(3, ratio);
        for (ElementFamily fam : {ElementFamily::q1, ElementFamily::q2}) {
            const ScalarDofMap cmap{fam, hier.coarse.n};
            const ScalarDofMap fmap{fam, hier.fine.n};
            const auto coarse = random_vector(rng, static_cast<std::size_t>(cmap.dofs()));
            const auto fine = prolongate_field(hier, fam, coarse);
            for (int s = 0; s < 50; ++s) {
                const double x = interior(rng), y = interior(rng);
                const double vc = eval_scalar_field(cmap, hier.coarse, coarse, x, y);
                const double vf = eval_scalar_field(fmap, hier.fine, fine, x, y);
                r.worst = std::max(r.worst, std::abs(vc - vf));
            }
        }
    }
    r.pass = r.worst <= bound;
    return r;
}

/// div u = 0 inside the domain and u = 0 on its boundary, at random samples.
inline CheckResult check_manufactured_validity(const ManufacturedSolution& sol, int samples = 1000,
                                               double bound = 1e-12, unsigned seed = 20240904) {
    CheckResult r{"manufactured validity (" + sol.name() + ")", false, 0.0, bound};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> tdist(0.0, 4.0);
    for (int s = 0; s < samples; ++s) {
        const double t = tdist(rng);
        const double x = unit(rng), y = unit(rng);
        const Mat2 g = sol.velocity_grad(t, x, y);
        r.worst = std::max(r.worst, std::abs(g.xx + g.yy));
        // matching boundary sample: project the point onto a random edge
        const int edge = static_cast<int>(unit(rng) * 4.0) % 4;
        const double bx = edge == 0 ? 0.0 : (edge == 1 ? 1.0 : x);
        const double by = edge == 2 ? 0.0 : (edge == 3 ? 1.0 : y);
        const Vec2 ub = sol.velocity(t, bx, by);
        r.worst = std::max(r.worst, std::max(std::abs(ub.x), std::abs(ub.y)));
    }
    r.pass = r.worst <= bound;
    return r;
}

/// Hard-coded forcing closures against the finite-difference route.
inline CheckResult check_forcing_oracle(const ManufacturedSolution& sol, double nu,
                                        int samples = 200, double bound = 1e-6,
                                        unsigned seed = 20240905) {
    CheckResult r{"forcing vs finite-difference oracle (" + sol.name() + ")", false, 0.0, bound};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> tdist(0.0, 4.0);
    for (int s = 0; s < samples; ++s) {
        const double t = tdist(rng), x = unit(rng), y = unit(rng);
        const Vec2 f = sol.forcing(nu, t, x, y);
        const Vec2 fd = finite_difference_forcing(sol, nu, t, x, y);
        r.worst = std::max(r.worst, std::max(std::abs(f.x - fd.x), std::abs(f.y - fd.y)));
    }
    r.pass = r.worst <= bound;
    return r;
}

inline std::vector<CheckResult> run_check_bundle() {
    std::vector<CheckResult> out;
    out.push_back(check_skew_symmetry());
    out.push_back(check_assembly_oracle());
    out.push_back(check_shape_gradients());
    out.push_back(check_quadrature_exactness());
    out.push_back(check_prolongation());
    const TrigVortexSolution t1;
    const PolynomialVortexSolution t2;
    out.push_back(check_manufactured_validity(t1));
    out.push_back(check_manufactured_validity(t2));
    out.push_back(check_forcing_oracle(t1, t1.default_viscosity()));
    out.push_back(check_forcing_oracle(t2, t2.default_viscosity()));
    return out;
}

}  // namespace mcrs
