#pragma once

// Brute-force dense re-assembly of every operator, kept deliberately
// independent of the sparse assembly path: shape functions are evaluated
// through generic 1D Lagrange products, quadrature data is written out
// locally, and accumulation is dense. Used as the oracle in `check` runs
// and in the test suites.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "mcrs/space.hpp"
#include "mcrs/sparse.hpp"

namespace mcrs::dense_check {

inline double lagrange_1d(std::span<const double> nodes, int i, double t) {
    double v = 1.0;
    for (std::size_t j = 0; j < nodes.size(); ++j)
        if (static_cast<int>(j) != i) v *= (t - nodes[j]) / (nodes[static_cast<std::size_t>(i)] - nodes[j]);
    return v;
}

inline double lagrange_1d_deriv(std::span<const double> nodes, int i, double t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (static_cast<int>(k) == i) continue;
        double term = 1.0 / (nodes[static_cast<std::size_t>(i)] - nodes[k]);
        for (std::size_t j = 0; j < nodes.size(); ++j)
            if (static_cast<int>(j) != i && j != k)
                term *= (t - nodes[j]) / (nodes[static_cast<std::size_t>(i)] - nodes[j]);
        acc += term;
    }
    return acc;
}

inline std::vector<double> family_nodes_1d(ElementFamily f) {
    switch (f) {
        case ElementFamily::q0: return {0.0};
        case ElementFamily::q1: return {-1.0, 1.0};
        case ElementFamily::q2: return {-1.0, 0.0, 1.0};
    }
    return {};
}

inline double shape_value(ElementFamily f, int local, double xi, double eta) {
    if (f == ElementFamily::q0) return 1.0;
    const auto nodes = family_nodes_1d(f);
    const int k = static_cast<int>(nodes.size());
    return lagrange_1d(nodes, local % k, xi) * lagrange_1d(nodes, local / k, eta);
}

inline std::array<double, 2> shape_ref_grad(ElementFamily f, int local, double xi, double eta) {
    if (f == ElementFamily::q0) return {0.0, 0.0};
    const auto nodes = family_nodes_1d(f);
    const int k = static_cast<int>(nodes.size());
    return {lagrange_1d_deriv(nodes, local % k, xi) * lagrange_1d(nodes, local / k, eta),
            lagrange_1d(nodes, local % k, xi) * lagrange_1d_deriv(nodes, local / k, eta)};
}

struct GaussPoint {
    double xi, eta, weight;
};

inline std::vector<GaussPoint> gauss_points() {
    const double g = std::sqrt(0.6);
    const double w0 = 5.0 / 9.0, w1 = 8.0 / 9.0;
    std::vector<GaussPoint> pts;
    const std::array<double, 3> x{-g, 0.0, g};
    const std::array<double, 3> w{w0, w1, w0};
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) pts.push_back({x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)], w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)]});
    return pts;
}

inline Eigen::MatrixXd scalar_mass(const QuadMesh& mesh, ElementFamily family) {
    const ScalarDofMap map{family, mesh.n};
    const int nd = map.dofs_per_elem();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(map.dofs(), map.dofs());
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    std::vector<int> dofs(static_cast<std::size_t>(nd));
    for (int e = 0; e < mesh.element_count(); ++e) {
        map.element_dofs(e, dofs);
        for (const auto& gp : gauss_points())
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j)
                    m(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)]) +=
                        gp.weight * det_j * shape_value(family, i, gp.xi, gp.eta) *
                        shape_value(family, j, gp.xi, gp.eta);
    }
    return m;
}

inline Eigen::MatrixXd scalar_stiffness(const QuadMesh& mesh, ElementFamily family, double nu) {
    const ScalarDofMap map{family, mesh.n};
    const int nd = map.dofs_per_elem();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(map.dofs(), map.dofs());
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    const double jinv = 2.0 / mesh.spacing;
    std::vector<int> dofs(static_cast<std::size_t>(nd));
    for (int e = 0; e < mesh.element_count(); ++e) {
        map.element_dofs(e, dofs);
        for (const auto& gp : gauss_points())
            for (int i = 0; i < nd; ++i) {
                const auto gi = shape_ref_grad(family, i, gp.xi, gp.eta);
                for (int j = 0; j < nd; ++j) {
                    const auto gj = shape_ref_grad(family, j, gp.xi, gp.eta);
                    m(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)]) +=
                        nu * gp.weight * det_j * jinv * jinv * (gi[0] * gj[0] + gi[1] * gj[1]);
                }
            }
    }
    return m;
}

inline Eigen::MatrixXd vector_from_scalar(const Eigen::MatrixXd& s) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * s.rows(), 2 * s.cols());
    m.topLeftCorner(s.rows(), s.cols()) = s;
    m.bottomRightCorner(s.rows(), s.cols()) = s;
    return m;
}

inline Eigen::MatrixXd mass(const MixedSpace& space) {
    return vector_from_scalar(scalar_mass(space.mesh, ElementFamily::q2));
}

inline Eigen::MatrixXd stiffness(const MixedSpace& space, double nu) {
    return vector_from_scalar(scalar_stiffness(space.mesh, ElementFamily::q2, nu));
}

inline Eigen::MatrixXd divergence(const MixedSpace& space) {
    const QuadMesh& mesh = space.mesh;
    const int vs = space.velocity_scalar.dofs();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(space.pressure_dofs(), space.velocity_dofs());
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    const double jinv = 2.0 / mesh.spacing;
    std::array<int, 9> vdofs{};
    std::array<int, 4> pdofs{};
    for (int e = 0; e < mesh.element_count(); ++e) {
        space.velocity_scalar.element_dofs(e, vdofs);
        space.pressure_q1.element_dofs(e, pdofs);
        for (const auto& gp : gauss_points())
            for (int j = 0; j < 9; ++j) {
                const auto g = shape_ref_grad(ElementFamily::q2, j, gp.xi, gp.eta);
                const double dx = g[0] * jinv, dy = g[1] * jinv;
                for (int i = 0; i < 4; ++i) {
                    const double pw = gp.weight * det_j * shape_value(ElementFamily::q1, i, gp.xi, gp.eta);
                    m(pdofs[static_cast<std::size_t>(i)], vdofs[static_cast<std::size_t>(j)]) += pw * dx;
                    m(pdofs[static_cast<std::size_t>(i)], vs + vdofs[static_cast<std::size_t>(j)]) += pw * dy;
                }
                if (space.pressure_q0) {
                    m(space.q0_offset() + e, vdofs[static_cast<std::size_t>(j)]) += gp.weight * det_j * dx;
                    m(space.q0_offset() + e, vs + vdofs[static_cast<std::size_t>(j)]) += gp.weight * det_j * dy;
                }
            }
    }
    return m;
}

inline Eigen::MatrixXd convection(const MixedSpace& space, std::span<const double> w_coeffs) {
    const QuadMesh& mesh = space.mesh;
    const int vs = space.velocity_scalar.dofs();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(vs, vs);
    const double det_j = mesh.spacing * mesh.spacing / 4.0;
    const double jinv = 2.0 / mesh.spacing;
    std::array<int, 9> dofs{};
    for (int e = 0; e < mesh.element_count(); ++e) {
        space.velocity_scalar.element_dofs(e, dofs);
        for (const auto& gp : gauss_points()) {
            double wx = 0.0, wy = 0.0;
            for (int l = 0; l < 9; ++l) {
                const double v = shape_value(ElementFamily::q2, l, gp.xi, gp.eta);
                wx += w_coeffs[static_cast<std::size_t>(dofs[static_cast<std::size_t>(l)])] * v;
                wy += w_coeffs[static_cast<std::size_t>(vs + dofs[static_cast<std::size_t>(l)])] * v;
            }
            for (int i = 0; i < 9; ++i) {
                const double vi = shape_value(ElementFamily::q2, i, gp.xi, gp.eta);
                for (int j = 0; j < 9; ++j) {
                    const auto gj = shape_ref_grad(ElementFamily::q2, j, gp.xi, gp.eta);
                    c(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)]) +=
                        gp.weight * det_j * (wx * gj[0] + wy * gj[1]) * jinv * vi;
                }
            }
        }
    }
    const Eigen::MatrixXd n_scalar = 0.5 * (c - c.transpose());
    return vector_from_scalar(n_scalar);
}

inline double max_abs_diff(const Eigen::MatrixXd& dense, const CsrMatrix& sparse) {
    double worst = 0.0;
    for (int r = 0; r < sparse.rows(); ++r)
        for (int c = 0; c < sparse.cols(); ++c)
            worst = std::max(worst, std::abs(dense(r, c) - sparse.value_at(r, c)));
    return worst;
}

}  // namespace mcrs::dense_check
