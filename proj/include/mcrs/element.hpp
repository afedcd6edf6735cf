#pragma once

// Reference elements on [-1,1]^2 (tensor-product Lagrange families) and
// Gauss-Legendre quadrature for uniform quadrilateral cells.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace mcrs {

enum class ElementFamily { q0, q1, q2 };

inline int family_dof_count(ElementFamily f) {
    switch (f) {
        case ElementFamily::q0: return 1;
        case ElementFamily::q1: return 4;
        case ElementFamily::q2: return 9;
    }
    throw std::logic_error("unknown element family");
}

inline const char* family_name(ElementFamily f) {
    switch (f) {
        case ElementFamily::q0: return "q0";
        case ElementFamily::q1: return "q1";
        case ElementFamily::q2: return "q2";
    }
    return "?";
}

/// Tensor-product Lagrange element on the reference square [-1,1]^2.
///
/// Local numbering is lexicographic in the 1D node tensor product
/// (x index fastest): Q1 nodes at (-1,-1),(1,-1),(-1,1),(1,1); Q2 adds
/// the midpoints and center in the same row-major order.
struct ReferenceElement {
    ElementFamily family = ElementFamily::q1;

    int dof_count() const { return family_dof_count(family); }
    int nodes_1d() const {
        return family == ElementFamily::q0 ? 1 : (family == ElementFamily::q1 ? 2 : 3);
    }

    /// Shape values at a reference point. `out` must hold dof_count() entries.
    void eval(double xi, double eta, std::span<double> out) const {
        std::array<double, 3> lx{}, ly{};
        const int k = shapes_1d(xi, lx);
        shapes_1d(eta, ly);
        for (int b = 0; b < k; ++b)
            for (int a = 0; a < k; ++a) out[static_cast<std::size_t>(b * k + a)] = lx[a] * ly[b];
    }

    /// Reference gradients (d/dxi, d/deta) at a point; dof_count() rows.
    void grad(double xi, double eta, std::span<std::array<double, 2>> out) const {
        std::array<double, 3> lx{}, ly{}, dx{}, dy{};
        const int k = shapes_1d(xi, lx);
        shapes_1d(eta, ly);
        derivs_1d(xi, dx);
        derivs_1d(eta, dy);
        for (int b = 0; b < k; ++b)
            for (int a = 0; a < k; ++a)
                out[static_cast<std::size_t>(b * k + a)] = {dx[a] * ly[b], lx[a] * dy[b]};
    }

    /// Reference coordinates of local node `i`.
    std::array<double, 2> node(int i) const {
        if (family == ElementFamily::q0) return {0.0, 0.0};
        const int k = nodes_1d();
        const double step = 2.0 / (k - 1);
        return {-1.0 + step * (i % k), -1.0 + step * (i / k)};
    }

  private:
    int shapes_1d(double t, std::array<double, 3>& l) const {
        switch (family) {
            case ElementFamily::q0: l[0] = 1.0; return 1;
            case ElementFamily::q1:
                l[0] = 0.5 * (1.0 - t);
                l[1] = 0.5 * (1.0 + t);
                return 2;
            case ElementFamily::q2:
                l[0] = 0.5 * t * (t - 1.0);
                l[1] = 1.0 - t * t;
                l[2] = 0.5 * t * (t + 1.0);
                return 3;
        }
        return 0;
    }
    void derivs_1d(double t, std::array<double, 3>& d) const {
        switch (family) {
            case ElementFamily::q0: d[0] = 0.0; break;
            case ElementFamily::q1:
                d[0] = -0.5;
                d[1] = 0.5;
                break;
            case ElementFamily::q2:
                d[0] = t - 0.5;
                d[1] = -2.0 * t;
                d[2] = t + 0.5;
                break;
        }
    }
};

/// Quadrature rule on the reference square; weights sum to its area (4).
struct QuadratureRule {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }

    /// 3x3 Gauss-Legendre: exact for tensor polynomials of degree 5 per
    /// direction, which covers every Q2xQ2 product assembled here.
    static const QuadratureRule& gauss3x3() {
        static const QuadratureRule rule = [] {
            QuadratureRule r;
            const double g = std::sqrt(3.0 / 5.0);
            const std::array<double, 3> pt{-g, 0.0, g};
            const std::array<double, 3> wt{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i < 3; ++i) {
                    r.points.push_back({pt[i], pt[j]});
                    r.weights.push_back(wt[i] * wt[j]);
                }
            return r;
        }();
        return rule;
    }
};

/// Shape values and reference gradients tabulated at quadrature points.
struct ShapeTable {
    ReferenceElement elem;
    std::vector<std::vector<double>> values;                  // [qp][dof]
    std::vector<std::vector<std::array<double, 2>>> grads;    // [qp][dof]

    ShapeTable() = default;
    ShapeTable(ElementFamily family, const QuadratureRule& rule) : elem{family} {
        const int nd = elem.dof_count();
        values.resize(rule.points.size(), std::vector<double>(static_cast<std::size_t>(nd)));
        grads.resize(rule.points.size(),
                     std::vector<std::array<double, 2>>(static_cast<std::size_t>(nd)));
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            elem.eval(rule.points[q][0], rule.points[q][1], values[q]);
            elem.grad(rule.points[q][0], rule.points[q][1], grads[q]);
        }
    }
};

}  // namespace mcrs
