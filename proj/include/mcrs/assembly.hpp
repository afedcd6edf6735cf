#pragma once

// Assembly of the mass matrix, viscous stiffness, divergence constraint,
// skew-symmetric convection, load vectors, and L2 projections.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcrs/element.hpp"
#include "mcrs/mesh.hpp"
#include "mcrs/solver.hpp"
#include "mcrs/space.hpp"
#include "mcrs/sparse.hpp"

namespace mcrs {

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<std::array<double, 2>(double, double)>;

namespace detail {

inline const ShapeTable& table_for(ElementFamily family) {
    static const ShapeTable q0{ElementFamily::q0, QuadratureRule::gauss3x3()};
    static const ShapeTable q1{ElementFamily::q1, QuadratureRule::gauss3x3()};
    static const ShapeTable q2{ElementFamily::q2, QuadratureRule::gauss3x3()};
    switch (family) {
        case ElementFamily::q0: return q0;
        case ElementFamily::q1: return q1;
        case ElementFamily::q2: return q2;
    }
    throw std::logic_error("unknown family");
}

}  // namespace detail

/// Scalar L2 mass matrix for one family.
inline CsrMatrix assemble_scalar_mass(const QuadMesh& mesh, ElementFamily family) {
    const auto& rule = QuadratureRule::gauss3x3();
    const auto& tab = detail::table_for(family);
    const ScalarDofMap map{family, mesh.n};
    const int nd = map.dofs_per_elem();
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(mesh.element_count() * nd * nd));
    std::vector<int> dofs(static_cast<std::size_t>(nd));
    for (int e = 0; e < mesh.element_count(); ++e) {
        map.element_dofs(e, dofs);
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[static_cast<std::size_t>(q)] * det_j;
            const auto& v = tab.values[static_cast<std::size_t>(q)];
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j)
                    trip.push_back({dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)],
                                    w * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)]});
        }
    }
    return CsrMatrix::from_triplets(map.dofs(), map.dofs(), std::move(trip));
}

/// Scalar viscous stiffness nu*(grad, grad) for one family.
inline CsrMatrix assemble_scalar_stiffness(const QuadMesh& mesh, ElementFamily family, double nu) {
    if (nu <= 0.0) throw std::invalid_argument("assemble_scalar_stiffness: nu must be positive");
    const auto& rule = QuadratureRule::gauss3x3();
    const auto& tab = detail::table_for(family);
    const ScalarDofMap map{family, mesh.n};
    const int nd = map.dofs_per_elem();
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    const double jinv = 2.0 / mesh.spacing;  // uniform axis-aligned cells
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(mesh.element_count() * nd * nd));
    std::vector<int> dofs(static_cast<std::size_t>(nd));
    for (int e = 0; e < mesh.element_count(); ++e) {
        map.element_dofs(e, dofs);
        for (int q = 0; q < rule.size(); ++q) {
            const double w = nu * rule.weights[static_cast<std::size_t>(q)] * det_j * jinv * jinv;
            const auto& g = tab.grads[static_cast<std::size_t>(q)];
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j)
                    trip.push_back({dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)],
                                    w * (g[static_cast<std::size_t>(i)][0] * g[static_cast<std::size_t>(j)][0] +
                                         g[static_cast<std::size_t>(i)][1] * g[static_cast<std::size_t>(j)][1])});
        }
    }
    return CsrMatrix::from_triplets(map.dofs(), map.dofs(), std::move(trip));
}

namespace detail {

/// Expand a scalar velocity-block operator to the vector space (two
/// identical diagonal blocks).
inline CsrMatrix expand_velocity_blocks(const CsrMatrix& scalar) {
    const int vs = scalar.rows();
    std::vector<Triplet> trip;
    trip.reserve(2 * scalar.nonzeros());
    for (int comp = 0; comp < 2; ++comp) {
        const int off = comp * vs;
        for (int r = 0; r < vs; ++r)
            for (int k = scalar.row_offsets()[r]; k < scalar.row_offsets()[static_cast<std::size_t>(r) + 1]; ++k)
                trip.push_back({off + r, off + scalar.col_indices()[static_cast<std::size_t>(k)],
                                scalar.values()[static_cast<std::size_t>(k)]});
    }
    return CsrMatrix::from_triplets(2 * vs, 2 * vs, std::move(trip));
}

}  // namespace detail

/// Velocity mass matrix (u,v), blocked per component.
inline CsrMatrix assemble_mass(const MixedSpace& space) {
    return detail::expand_velocity_blocks(assemble_scalar_mass(space.mesh, ElementFamily::q2));
}

/// Velocity viscous stiffness nu*(grad u, grad v).
inline CsrMatrix assemble_stiffness(const MixedSpace& space, double nu) {
    return detail::expand_velocity_blocks(assemble_scalar_stiffness(space.mesh, ElementFamily::q2, nu));
}

/// Divergence coupling B[q][v] = (psi_q, div phi_v).
inline CsrMatrix assemble_divergence(const MixedSpace& space) {
    const auto& rule = QuadratureRule::gauss3x3();
    const auto& vtab = detail::table_for(ElementFamily::q2);
    const auto& ptab = detail::table_for(ElementFamily::q1);
    const QuadMesh& mesh = space.mesh;
    const int vs = space.velocity_scalar.dofs();
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    const double jinv = 2.0 / mesh.spacing;
    std::vector<Triplet> trip;
    std::array<int, 9> vdofs{};
    std::array<int, 4> pdofs{};
    for (int e = 0; e < mesh.element_count(); ++e) {
        space.velocity_scalar.element_dofs(e, vdofs);
        space.pressure_q1.element_dofs(e, pdofs);
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[static_cast<std::size_t>(q)] * det_j;
            const auto& vg = vtab.grads[static_cast<std::size_t>(q)];
            const auto& pv = ptab.values[static_cast<std::size_t>(q)];
            for (int j = 0; j < 9; ++j) {
                const double dpx = vg[static_cast<std::size_t>(j)][0] * jinv;
                const double dpy = vg[static_cast<std::size_t>(j)][1] * jinv;
                for (int i = 0; i < 4; ++i) {
                    const double pw = w * pv[static_cast<std::size_t>(i)];
                    trip.push_back({pdofs[static_cast<std::size_t>(i)], vdofs[static_cast<std::size_t>(j)], pw * dpx});
                    trip.push_back({pdofs[static_cast<std::size_t>(i)], vs + vdofs[static_cast<std::size_t>(j)], pw * dpy});
                }
                if (space.pressure_q0) {
                    trip.push_back({space.q0_offset() + e, vdofs[static_cast<std::size_t>(j)], w * dpx});
                    trip.push_back({space.q0_offset() + e, vs + vdofs[static_cast<std::size_t>(j)], w * dpy});
                }
            }
        }
    }
    return CsrMatrix::from_triplets(space.pressure_dofs(), space.velocity_dofs(), std::move(trip));
}

/// Skew-symmetric convection operator N(w) with
/// N[i][j] = 1/2 ((w.grad) phi_j, phi_i) - 1/2 ((w.grad) phi_i, phi_j),
/// so v^T N(w) v = 0 holds algebraically, independent of quadrature.
inline CsrMatrix assemble_convection(const MixedSpace& space, std::span<const double> w_coeffs) {
    if (static_cast<int>(w_coeffs.size()) != space.velocity_dofs())
        throw std::invalid_argument("assemble_convection: velocity coefficient size mismatch");
    const auto& rule = QuadratureRule::gauss3x3();
    const auto& tab = detail::table_for(ElementFamily::q2);
    const QuadMesh& mesh = space.mesh;
    const int vs = space.velocity_scalar.dofs();
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    const double jinv = 2.0 / mesh.spacing;
    std::vector<Triplet> trip;
    std::array<int, 9> dofs{};
    for (int e = 0; e < mesh.element_count(); ++e) {
        space.velocity_scalar.element_dofs(e, dofs);
        for (int q = 0; q < rule.size(); ++q) {
            const double wq = rule.weights[static_cast<std::size_t>(q)] * det_j;
            const auto& val = tab.values[static_cast<std::size_t>(q)];
            const auto& grd = tab.grads[static_cast<std::size_t>(q)];
            double wx = 0.0, wy = 0.0;
            for (int l = 0; l < 9; ++l) {
                const auto g = dofs[static_cast<std::size_t>(l)];
                wx += w_coeffs[static_cast<std::size_t>(g)] * val[static_cast<std::size_t>(l)];
                wy += w_coeffs[static_cast<std::size_t>(vs + g)] * val[static_cast<std::size_t>(l)];
            }
            for (int i = 0; i < 9; ++i)
                for (int j = 0; j < 9; ++j) {
                    const double adv = (wx * grd[static_cast<std::size_t>(j)][0] +
                                        wy * grd[static_cast<std::size_t>(j)][1]) * jinv *
                                       val[static_cast<std::size_t>(i)];
                    const double c = 0.5 * wq * adv;
                    const int gi = dofs[static_cast<std::size_t>(i)];
                    const int gj = dofs[static_cast<std::size_t>(j)];
                    for (int comp = 0; comp < 2; ++comp) {
                        const int off = comp * vs;
                        trip.push_back({off + gi, off + gj, c});
                        trip.push_back({off + gj, off + gi, -c});
                    }
                }
        }
    }
    return CsrMatrix::from_triplets(space.velocity_dofs(), space.velocity_dofs(), std::move(trip));
}

/// Repeated reassembly of the skew convection block on a fixed sparsity
/// pattern. Time steppers rebuild N(w) every step; the symbolic structure
/// and element-to-slot map are computed once so each rebuild is a fused
/// numeric sweep. Not thread-safe: one instance per integration.
class ConvectionOperator {
  public:
    explicit ConvectionOperator(const MixedSpace& space) : space_(&space) {
        const int nd = 9;
        std::vector<Triplet> pattern;
        pattern.reserve(static_cast<std::size_t>(space.mesh.element_count()) * nd * nd);
        std::array<int, 9> dofs{};
        for (int e = 0; e < space.mesh.element_count(); ++e) {
            space.velocity_scalar.element_dofs(e, dofs);
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j)
                    pattern.push_back({dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], 0.0});
        }
        scalar_ = CsrMatrix::from_triplets(space.velocity_scalar.dofs(),
                                           space.velocity_scalar.dofs(), std::move(pattern));
        slots_.resize(static_cast<std::size_t>(space.mesh.element_count()) * nd * nd);
        for (int e = 0; e < space.mesh.element_count(); ++e) {
            space.velocity_scalar.element_dofs(e, dofs);
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j)
                    slots_[static_cast<std::size_t>((e * nd + i) * nd + j)] =
                        slot_of(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)]);
        }
    }

    /// Assemble N(w) into the cached block and return N(w) * x for the
    /// component-blocked velocity layout.
    std::vector<double> apply(std::span<const double> w, std::span<const double> x) {
        assemble_values(w);
        const int vs = space_->velocity_scalar.dofs();
        std::vector<double> y(static_cast<std::size_t>(2 * vs));
        scalar_.multiply(x.subspan(0, static_cast<std::size_t>(vs)),
                         std::span<double>(y).subspan(0, static_cast<std::size_t>(vs)));
        scalar_.multiply(x.subspan(static_cast<std::size_t>(vs)),
                         std::span<double>(y).subspan(static_cast<std::size_t>(vs)));
        return y;
    }

    const CsrMatrix& scalar_block() const { return scalar_; }

  private:
    int slot_of(int r, int c) const {
        for (int k = scalar_.row_offsets()[r]; k < scalar_.row_offsets()[static_cast<std::size_t>(r) + 1]; ++k)
            if (scalar_.col_indices()[static_cast<std::size_t>(k)] == c) return k;
        throw std::logic_error("ConvectionOperator: slot not in pattern");
    }

    void assemble_values(std::span<const double> w) {
        if (static_cast<int>(w.size()) != space_->velocity_dofs())
            throw std::invalid_argument("ConvectionOperator: velocity coefficient size mismatch");
        const auto& rule = QuadratureRule::gauss3x3();
        const auto& tab = detail::table_for(ElementFamily::q2);
        const QuadMesh& mesh = space_->mesh;
        const int vs = space_->velocity_scalar.dofs();
        const double det_j = mesh.spacing * mesh.spacing / 4.0;
        const double jinv = 2.0 / mesh.spacing;
        std::fill(scalar_.values().begin(), scalar_.values().end(), 0.0);
        std::array<int, 9> dofs{};
        for (int e = 0; e < mesh.element_count(); ++e) {
            space_->velocity_scalar.element_dofs(e, dofs);
            const int base = e * 81;
            for (int q = 0; q < rule.size(); ++q) {
                const double wq = rule.weights[static_cast<std::size_t>(q)] * det_j;
                const auto& val = tab.values[static_cast<std::size_t>(q)];
                const auto& grd = tab.grads[static_cast<std::size_t>(q)];
                double wx = 0.0, wy = 0.0;
                for (int l = 0; l < 9; ++l) {
                    const int g = dofs[static_cast<std::size_t>(l)];
                    wx += w[static_cast<std::size_t>(g)] * val[static_cast<std::size_t>(l)];
                    wy += w[static_cast<std::size_t>(vs + g)] * val[static_cast<std::size_t>(l)];
                }
                for (int i = 0; i < 9; ++i) {
                    const double vi = 0.5 * wq * val[static_cast<std::size_t>(i)] * jinv;
                    for (int j = 0; j < 9; ++j) {
                        const double c = vi * (wx * grd[static_cast<std::size_t>(j)][0] +
                                               wy * grd[static_cast<std::size_t>(j)][1]);
                        scalar_.values()[static_cast<std::size_t>(slots_[static_cast<std::size_t>(base + i * 9 + j)])] += c;
                        scalar_.values()[static_cast<std::size_t>(slots_[static_cast<std::size_t>(base + j * 9 + i)])] -= c;
                    }
                }
            }
        }
    }

    const MixedSpace* space_;
    CsrMatrix scalar_;
    std::vector<int> slots_;
};

/// Load vector (f, v) for a vector-valued field.
inline std::vector<double> assemble_velocity_load(const MixedSpace& space, const VectorField& f) {
    const auto& rule = QuadratureRule::gauss3x3();
    const auto& tab = detail::table_for(ElementFamily::q2);
    const QuadMesh& mesh = space.mesh;
    const int vs = space.velocity_scalar.dofs();
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    std::vector<double> load(static_cast<std::size_t>(2 * vs), 0.0);
    std::array<int, 9> dofs{};
    for (int e = 0; e < mesh.element_count(); ++e) {
        space.velocity_scalar.element_dofs(e, dofs);
        const auto origin = mesh.cell_origin(e);
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[static_cast<std::size_t>(q)] * det_j;
            const auto& pt = rule.points[static_cast<std::size_t>(q)];
            const double x = origin[0] + 0.5 * (pt[0] + 1.0) * mesh.spacing;
            const double y = origin[1] + 0.5 * (pt[1] + 1.0) * mesh.spacing;
            const auto fv = f(x, y);
            const auto& val = tab.values[static_cast<std::size_t>(q)];
            for (int i = 0; i < 9; ++i) {
                const int g = dofs[static_cast<std::size_t>(i)];
                load[static_cast<std::size_t>(g)] += w * fv[0] * val[static_cast<std::size_t>(i)];
                load[static_cast<std::size_t>(vs + g)] += w * fv[1] * val[static_cast<std::size_t>(i)];
            }
        }
    }
    return load;
}

/// Scalar load vector (f, psi) for one family.
inline std::vector<double> assemble_scalar_load(const QuadMesh& mesh, ElementFamily family,
                                                const ScalarField& f) {
    const auto& rule = QuadratureRule::gauss3x3();
    const auto& tab = detail::table_for(family);
    const ScalarDofMap map{family, mesh.n};
    const int nd = map.dofs_per_elem();
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    std::vector<double> load(static_cast<std::size_t>(map.dofs()), 0.0);
    std::vector<int> dofs(static_cast<std::size_t>(nd));
    for (int e = 0; e < mesh.element_count(); ++e) {
        map.element_dofs(e, dofs);
        const auto origin = mesh.cell_origin(e);
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[static_cast<std::size_t>(q)] * det_j;
            const auto& pt = rule.points[static_cast<std::size_t>(q)];
            const double x = origin[0] + 0.5 * (pt[0] + 1.0) * mesh.spacing;
            const double y = origin[1] + 0.5 * (pt[1] + 1.0) * mesh.spacing;
            const double fv = f(x, y);
            for (int i = 0; i < nd; ++i)
                load[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])] +=
                    w * fv * tab.values[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
        }
    }
    return load;
}

/// Symmetric elimination of homogeneous Dirichlet dofs: masked rows and
/// columns become identity rows with zero right-hand side.
inline void apply_dirichlet(CsrMatrix& m, std::vector<double>& rhs,
                            std::span<const std::uint8_t> mask) {
    if (m.rows() != m.cols() || static_cast<int>(mask.size()) != m.rows() ||
        static_cast<int>(rhs.size()) != m.rows())
        throw std::invalid_argument("apply_dirichlet: dimension mismatch");
    for (int r = 0; r < m.rows(); ++r) {
        const bool row_masked = mask[static_cast<std::size_t>(r)] != 0;
        if (row_masked) rhs[static_cast<std::size_t>(r)] = 0.0;
        for (int k = m.row_offsets()[r]; k < m.row_offsets()[static_cast<std::size_t>(r) + 1]; ++k) {
            const int c = m.col_indices()[static_cast<std::size_t>(k)];
            if (row_masked || mask[static_cast<std::size_t>(c)])
                m.values()[static_cast<std::size_t>(k)] = (row_masked && c == r) ? 1.0 : 0.0;
        }
    }
}

/// L2 projection of an analytic vector field onto the velocity space:
/// M c = (f, v), solved per component with the scalar mass factorization.
inline std::vector<double> l2_project_velocity(const MixedSpace& space, const VectorField& field,
                                               const SpdSolver& scalar_mass, double tol) {
    const int vs = space.velocity_scalar.dofs();
    auto load = assemble_velocity_load(space, field);
    std::vector<double> out(static_cast<std::size_t>(2 * vs));
    const auto cx = scalar_mass.solve(std::span<const double>(load).subspan(0, static_cast<std::size_t>(vs)), tol);
    const auto cy = scalar_mass.solve(std::span<const double>(load).subspan(static_cast<std::size_t>(vs)), tol);
    std::copy(cx.begin(), cx.end(), out.begin());
    std::copy(cy.begin(), cy.end(), out.begin() + vs);
    return out;
}

/// L2 projection onto the pressure space. The enriched (Q1+Q0) Gram matrix
/// is singular along the constant-shift redundancy; the kernel vector is
/// appended as a gauge multiplier to pick the representative.
inline std::vector<double> l2_project_pressure(const MixedSpace& space, const ScalarField& field,
                                               double tol) {
    const QuadMesh& mesh = space.mesh;
    auto load = assemble_scalar_load(mesh, ElementFamily::q1, field);
    if (!space.pressure_q0) {
        const auto mass = assemble_scalar_mass(mesh, ElementFamily::q1);
        return SpdSolver(mass).solve(load, tol);
    }
    const auto q0_load = assemble_scalar_load(mesh, ElementFamily::q0, field);
    load.insert(load.end(), q0_load.begin(), q0_load.end());
    // Mixed Gram matrix over [Q1 | Q0] with kernel span{(1, -1)}.
    const int np = space.pressure_dofs();
    const int off = space.q0_offset();
    std::vector<Triplet> trip;
    const auto q1_mass = assemble_scalar_mass(mesh, ElementFamily::q1);
    for (int r = 0; r < q1_mass.rows(); ++r)
        for (int k = q1_mass.row_offsets()[r]; k < q1_mass.row_offsets()[static_cast<std::size_t>(r) + 1]; ++k)
            trip.push_back({r, q1_mass.col_indices()[static_cast<std::size_t>(k)],
                            q1_mass.values()[static_cast<std::size_t>(k)]});
    const double area = mesh.spacing * mesh.spacing;
    std::array<int, 4> pdofs{};
    for (int e = 0; e < mesh.element_count(); ++e) {
        trip.push_back({off + e, off + e, area});
        space.pressure_q1.element_dofs(e, pdofs);
        // cross terms (psi_q1, 1_K): integral of each Q1 basis over the cell
        for (int i = 0; i < 4; ++i) {
            trip.push_back({pdofs[static_cast<std::size_t>(i)], off + e, area / 4.0});
            trip.push_back({off + e, pdofs[static_cast<std::size_t>(i)], area / 4.0});
        }
    }
    // gauge row/column (kernel direction): ties down the redundant constant
    for (int i = 0; i < np; ++i) {
        const double z = i < off ? 1.0 : -1.0;
        trip.push_back({np, i, z});
        trip.push_back({i, np, z});
    }
    load.resize(static_cast<std::size_t>(np + 1), 0.0);
    auto gram = CsrMatrix::from_triplets(np + 1, np + 1, std::move(trip));
    auto sol = LuSolver(gram).solve(load, tol);
    sol.resize(static_cast<std::size_t>(np));
    return sol;
}

/// Quadrature value of ||f||_{L2} for an analytic vector field.
inline double vector_field_l2_norm(const QuadMesh& mesh, const VectorField& f) {
    const auto& rule = QuadratureRule::gauss3x3();
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    double acc = 0.0;
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto origin = mesh.cell_origin(e);
        for (int q = 0; q < rule.size(); ++q) {
            const auto& pt = rule.points[static_cast<std::size_t>(q)];
            const double x = origin[0] + 0.5 * (pt[0] + 1.0) * mesh.spacing;
            const double y = origin[1] + 0.5 * (pt[1] + 1.0) * mesh.spacing;
            const auto fv = f(x, y);
            acc += rule.weights[static_cast<std::size_t>(q)] * det_j * (fv[0] * fv[0] + fv[1] * fv[1]);
        }
    }
    return std::sqrt(acc);
}

}  // namespace mcrs
