#pragma once

// Uniform quadrilateral meshes of the unit square and the nested two-level
// (coarse/fine) hierarchy used by the rapid solver scheme.

#include <array>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace mcrs {

/// Uniform axis-aligned quad mesh of (0,1)^2 with n cells per side.
///
/// Nodes are numbered lexicographically (x fastest); element corners are
/// stored counter-clockwise starting at the lower-left node.
struct QuadMesh {
    int n = 0;
    double spacing = 0.0;
    std::vector<std::array<double, 2>> node_coords;
    std::vector<std::array<int, 4>> element_conn;
    std::vector<std::uint8_t> boundary_node;

    int node_count() const { return static_cast<int>(node_coords.size()); }
    int element_count() const { return static_cast<int>(element_conn.size()); }

    std::array<int, 2> cell_of(int e) const { return {e % n, e / n}; }
    int cell_index(int cx, int cy) const { return cy * n + cx; }
    /// Lower-left corner of cell e.
    std::array<double, 2> cell_origin(int e) const {
        const auto [cx, cy] = cell_of(e);
        return {cx * spacing, cy * spacing};
    }
};

inline QuadMesh build_uniform_mesh(int n) {
    if (n < 1) throw std::invalid_argument("build_uniform_mesh: n must be >= 1");
    QuadMesh m;
    m.n = n;
    m.spacing = 1.0 / n;
    const int nn = n + 1;
    m.node_coords.reserve(static_cast<std::size_t>(nn) * nn);
    m.boundary_node.reserve(static_cast<std::size_t>(nn) * nn);
    for (int j = 0; j < nn; ++j)
        for (int i = 0; i < nn; ++i) {
            m.node_coords.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
            m.boundary_node.push_back(i == 0 || i == n || j == 0 || j == n ? 1 : 0);
        }
    m.element_conn.reserve(static_cast<std::size_t>(n) * n);
    for (int cy = 0; cy < n; ++cy)
        for (int cx = 0; cx < n; ++cx) {
            const int bl = cy * nn + cx;
            m.element_conn.push_back({bl, bl + 1, bl + nn + 1, bl + nn});
        }
    return m;
}

/// Nested coarse/fine pair with spacing ratio H/h and fine->coarse parent map.
struct TwoLevelHierarchy {
    QuadMesh coarse;
    QuadMesh fine;
    int ratio = 1;
    std::vector<int> parent_map;  // fine element -> containing coarse element
};

inline TwoLevelHierarchy build_hierarchy(int n_coarse, int ratio) {
    if (n_coarse < 1) throw std::invalid_argument("build_hierarchy: n_coarse must be >= 1");
    if (ratio < 1) throw std::invalid_argument("build_hierarchy: ratio must be >= 1");
    TwoLevelHierarchy h;
    h.ratio = ratio;
    h.coarse = build_uniform_mesh(n_coarse);
    h.fine = build_uniform_mesh(n_coarse * ratio);
    h.parent_map.reserve(static_cast<std::size_t>(h.fine.element_count()));
    for (int e = 0; e < h.fine.element_count(); ++e) {
        const auto [fx, fy] = h.fine.cell_of(e);
        h.parent_map.push_back(h.coarse.cell_index(fx / ratio, fy / ratio));
    }
    return h;
}

/// Plain-text mesh dump for debugging: header, `v x y` nodes, `q i0 i1 i2 i3`.
inline void dump_mesh(const QuadMesh& m, std::ostream& os) {
    os << "quadmesh n=" << m.n << "\n";
    for (const auto& p : m.node_coords) os << "v " << p[0] << " " << p[1] << "\n";
    for (const auto& q : m.element_conn)
        os << "q " << q[0] << " " << q[1] << " " << q[2] << " " << q[3] << "\n";
}

}  // namespace mcrs
