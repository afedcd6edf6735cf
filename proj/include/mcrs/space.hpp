#pragma once

// Discrete spaces on uniform quad meshes: scalar dof maps per element
// family, the mixed velocity/pressure space, Dirichlet masks, the pressure
// zero-mean gauge, and coarse-to-fine nodal prolongation.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcrs/element.hpp"
#include "mcrs/mesh.hpp"

namespace mcrs {

/// Global dof numbering for one scalar family on a uniform mesh.
///
/// Q1 dofs live on the mesh nodes, Q2 dofs on the twice-refined lattice,
/// Q0 dofs on the elements; all lexicographic with x fastest.
struct ScalarDofMap {
    ElementFamily family = ElementFamily::q1;
    int n = 0;  // cells per side

    int dofs() const {
        switch (family) {
            case ElementFamily::q0: return n * n;
            case ElementFamily::q1: return (n + 1) * (n + 1);
            case ElementFamily::q2: return (2 * n + 1) * (2 * n + 1);
        }
        return 0;
    }
    int dofs_per_elem() const { return family_dof_count(family); }

    void element_dofs(int e, std::span<int> out) const {
        const int cx = e % n, cy = e / n;
        switch (family) {
            case ElementFamily::q0: out[0] = e; return;
            case ElementFamily::q1: {
                const int w = n + 1;
                for (int b = 0; b < 2; ++b)
                    for (int a = 0; a < 2; ++a)
                        out[static_cast<std::size_t>(b * 2 + a)] = (cy + b) * w + (cx + a);
                return;
            }
            case ElementFamily::q2: {
                const int w = 2 * n + 1;
                for (int b = 0; b < 3; ++b)
                    for (int a = 0; a < 3; ++a)
                        out[static_cast<std::size_t>(b * 3 + a)] = (2 * cy + b) * w + (2 * cx + a);
                return;
            }
        }
    }

    std::array<double, 2> dof_point(int g) const {
        switch (family) {
            case ElementFamily::q0: {
                const int cx = g % n, cy = g / n;
                return {(cx + 0.5) / n, (cy + 0.5) / n};
            }
            case ElementFamily::q1: {
                const int w = n + 1;
                return {static_cast<double>(g % w) / n, static_cast<double>(g / w) / n};
            }
            case ElementFamily::q2: {
                const int w = 2 * n + 1;
                return {static_cast<double>(g % w) / (2 * n), static_cast<double>(g / w) / (2 * n)};
            }
        }
        return {0, 0};
    }

    bool dof_on_boundary(int g) const {
        switch (family) {
            case ElementFamily::q0: return false;
            case ElementFamily::q1: {
                const int w = n + 1, i = g % w, j = g / w;
                return i == 0 || i == n || j == 0 || j == n;
            }
            case ElementFamily::q2: {
                const int w = 2 * n + 1, i = g % w, j = g / w;
                return i == 0 || i == 2 * n || j == 0 || j == 2 * n;
            }
        }
        return false;
    }
};

enum class PressureSpaceKind { q1, q1_plus_q0 };

/// Mixed space: vector Q2 velocity with homogeneous Dirichlet mask, and a
/// Q1 (optionally Q0-enriched) pressure constrained to zero mean.
///
/// Velocity dof layout is blocked per component: [ux dofs | uy dofs].
/// Pressure layout: [Q1 dofs | Q0 dofs (if enriched)].
///
/// The enriched pressure basis is linearly dependent (a constant can be
/// moved between the Q1 and Q0 parts), so the space carries two gauge
/// vectors there: total zero mean plus zero mean of the Q0 part alone.
struct MixedSpace {
    QuadMesh mesh;
    ScalarDofMap velocity_scalar;
    ScalarDofMap pressure_q1;
    std::optional<ScalarDofMap> pressure_q0;
    PressureSpaceKind pressure_kind = PressureSpaceKind::q1;
    std::vector<std::uint8_t> dirichlet_mask;            // per velocity dof
    std::vector<std::vector<double>> pressure_gauge;     // each of length pressure_dofs()

    int velocity_dofs() const { return 2 * velocity_scalar.dofs(); }
    int pressure_dofs() const {
        return pressure_q1.dofs() + (pressure_q0 ? pressure_q0->dofs() : 0);
    }
    int q0_offset() const { return pressure_q1.dofs(); }

    int velocity_dof(int component, int scalar_dof) const {
        return component * velocity_scalar.dofs() + scalar_dof;
    }
};

inline MixedSpace make_mixed_space(const QuadMesh& mesh,
                                   PressureSpaceKind kind = PressureSpaceKind::q1) {
    MixedSpace s;
    s.mesh = mesh;
    s.velocity_scalar = {ElementFamily::q2, mesh.n};
    s.pressure_q1 = {ElementFamily::q1, mesh.n};
    s.pressure_kind = kind;
    if (kind == PressureSpaceKind::q1_plus_q0) s.pressure_q0 = ScalarDofMap{ElementFamily::q0, mesh.n};

    const int vs = s.velocity_scalar.dofs();
    s.dirichlet_mask.assign(static_cast<std::size_t>(2 * vs), 0);
    for (int g = 0; g < vs; ++g)
        if (s.velocity_scalar.dof_on_boundary(g)) {
            s.dirichlet_mask[static_cast<std::size_t>(g)] = 1;
            s.dirichlet_mask[static_cast<std::size_t>(vs + g)] = 1;
        }

    // Gauge vectors: entries are integrals of the pressure basis functions.
    const auto& rule = QuadratureRule::gauss3x3();
    const ShapeTable q1_tab(ElementFamily::q1, rule);
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    std::vector<double> total(static_cast<std::size_t>(s.pressure_dofs()), 0.0);
    std::array<int, 4> q1_dofs{};
    for (int e = 0; e < mesh.element_count(); ++e) {
        s.pressure_q1.element_dofs(e, q1_dofs);
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[static_cast<std::size_t>(q)] * det_j;
            for (int i = 0; i < 4; ++i)
                total[static_cast<std::size_t>(q1_dofs[static_cast<std::size_t>(i)])] +=
                    w * q1_tab.values[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
        }
        if (s.pressure_q0)
            total[static_cast<std::size_t>(s.q0_offset() + e)] +=
                mesh.spacing * mesh.spacing;
    }
    s.pressure_gauge.push_back(std::move(total));
    if (s.pressure_q0) {
        std::vector<double> q0_only(static_cast<std::size_t>(s.pressure_dofs()), 0.0);
        for (int e = 0; e < mesh.element_count(); ++e)
            q0_only[static_cast<std::size_t>(s.q0_offset() + e)] = mesh.spacing * mesh.spacing;
        s.pressure_gauge.push_back(std::move(q0_only));
    }
    return s;
}

/// Evaluate a scalar FE function at a physical point (owning cell located
/// by integer arithmetic; points on cell boundaries pick the lower cell).
inline double eval_scalar_field(const ScalarDofMap& map, const QuadMesh& mesh,
                                std::span<const double> coeffs, double x, double y) {
    const int n = mesh.n;
    auto clampc = [n](double v) {
        int c = static_cast<int>(v * n);
        if (c < 0) c = 0;
        if (c > n - 1) c = n - 1;
        return c;
    };
    const int cx = clampc(x), cy = clampc(y);
    const double h = mesh.spacing;
    const double xi = 2.0 * (x - cx * h) / h - 1.0;
    const double eta = 2.0 * (y - cy * h) / h - 1.0;
    const ReferenceElement elem{map.family};
    std::array<double, 9> vals{};
    std::array<int, 9> dofs{};
    elem.eval(xi, eta, std::span<double>(vals.data(), static_cast<std::size_t>(elem.dof_count())));
    map.element_dofs(cy * n + cx, std::span<int>(dofs.data(), static_cast<std::size_t>(map.dofs_per_elem())));
    double acc = 0.0;
    for (int i = 0; i < elem.dof_count(); ++i)
        acc += coeffs[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])] *
               vals[static_cast<std::size_t>(i)];
    return acc;
}

/// Nodal interpolation of a coarse FE function at the fine dof locations.
/// Exact on every function of the coarse space (nested uniform meshes).
inline std::vector<double> prolongate_field(const TwoLevelHierarchy& hier, ElementFamily family,
                                            std::span<const double> coarse_coeffs) {
    const ScalarDofMap coarse_map{family, hier.coarse.n};
    const ScalarDofMap fine_map{family, hier.fine.n};
    if (static_cast<int>(coarse_coeffs.size()) != coarse_map.dofs())
        throw std::invalid_argument("prolongate_field: coefficient size mismatch");
    std::vector<double> fine(static_cast<std::size_t>(fine_map.dofs()));
    if (family == ElementFamily::q0) {
        for (int e = 0; e < hier.fine.element_count(); ++e)
            fine[static_cast<std::size_t>(e)] =
                coarse_coeffs[static_cast<std::size_t>(hier.parent_map[static_cast<std::size_t>(e)])];
        return fine;
    }
    for (int g = 0; g < fine_map.dofs(); ++g) {
        const auto [x, y] = fine_map.dof_point(g);
        fine[static_cast<std::size_t>(g)] = eval_scalar_field(coarse_map, hier.coarse, coarse_coeffs, x, y);
    }
    return fine;
}

/// Component-blocked velocity prolongation.
inline std::vector<double> prolongate_velocity(const TwoLevelHierarchy& hier,
                                               std::span<const double> coarse_coeffs) {
    const ScalarDofMap cmap{ElementFamily::q2, hier.coarse.n};
    const int cs = cmap.dofs();
    if (static_cast<int>(coarse_coeffs.size()) != 2 * cs)
        throw std::invalid_argument("prolongate_velocity: coefficient size mismatch");
    auto fx = prolongate_field(hier, ElementFamily::q2, coarse_coeffs.subspan(0, static_cast<std::size_t>(cs)));
    auto fy = prolongate_field(hier, ElementFamily::q2, coarse_coeffs.subspan(static_cast<std::size_t>(cs)));
    fx.insert(fx.end(), fy.begin(), fy.end());
    return fx;
}

}  // namespace mcrs
