#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "mcrs/checks.hpp"
#include "mcrs/mesh.hpp"
#include "mcrs/space.hpp"

using namespace mcrs;

TEST(BuildUniformMesh, SmallestMesh) {
    const auto m = build_uniform_mesh(1);
    EXPECT_EQ(m.node_count(), 4);
    EXPECT_EQ(m.element_count(), 1);
    for (auto f : m.boundary_node) EXPECT_EQ(f, 1);
}

TEST(BuildUniformMesh, CountsAndInterior) {
    const auto m = build_uniform_mesh(2);
    EXPECT_EQ(m.node_count(), 9);
    EXPECT_EQ(m.element_count(), 4);
    int boundary = 0;
    for (auto f : m.boundary_node) boundary += f;
    EXPECT_EQ(boundary, 8);
    EXPECT_EQ(m.boundary_node[4], 0);  // (0.5, 0.5)
    EXPECT_DOUBLE_EQ(m.node_coords[4][0], 0.5);
    EXPECT_DOUBLE_EQ(m.node_coords[4][1], 0.5);
}

TEST(BuildUniformMesh, LexicographicNumbering) {
    const auto m = build_uniform_mesh(4);
    EXPECT_EQ(m.node_count(), 25);
    EXPECT_DOUBLE_EQ(m.node_coords[12][0], 0.5);
    EXPECT_DOUBLE_EQ(m.node_coords[12][1], 0.5);
    EXPECT_EQ(m.boundary_node[12], 0);
}

TEST(BuildUniformMesh, RejectsZero) {
    EXPECT_THROW(build_uniform_mesh(0), std::invalid_argument);
}

TEST(BuildUniformMesh, ConnectivityCounterClockwise) {
    const auto m = build_uniform_mesh(3);
    for (int e = 0; e < m.element_count(); ++e) {
        const auto& c = m.element_conn[static_cast<std::size_t>(e)];
        const auto& p0 = m.node_coords[static_cast<std::size_t>(c[0])];
        const auto& p1 = m.node_coords[static_cast<std::size_t>(c[1])];
        const auto& p3 = m.node_coords[static_cast<std::size_t>(c[3])];
        // constant positive Jacobian for axis-aligned cells
        const double jac = (p1[0] - p0[0]) * (p3[1] - p0[1]);
        EXPECT_GT(jac, 0.0);
        EXPECT_NEAR(jac, m.spacing * m.spacing, 1e-15);
    }
}

TEST(BuildHierarchy, NestedParents) {
    const auto h = build_hierarchy(2, 2);
    EXPECT_EQ(h.fine.n, 4);
    EXPECT_EQ(h.parent_map[0], 0);
    // every fine cell center lies inside its parent cell
    for (int e = 0; e < h.fine.element_count(); ++e) {
        const auto o = h.fine.cell_origin(e);
        const double cx = o[0] + 0.5 * h.fine.spacing;
        const double cy = o[1] + 0.5 * h.fine.spacing;
        const auto po = h.coarse.cell_origin(h.parent_map[static_cast<std::size_t>(e)]);
        EXPECT_GE(cx, po[0]);
        EXPECT_LE(cx, po[0] + h.coarse.spacing);
        EXPECT_GE(cy, po[1]);
        EXPECT_LE(cy, po[1] + h.coarse.spacing);
    }
}

TEST(BuildHierarchy, DegenerateRatioIsIdentity) {
    const auto h = build_hierarchy(3, 1);
    EXPECT_EQ(h.fine.n, h.coarse.n);
    for (int e = 0; e < h.fine.element_count(); ++e)
        EXPECT_EQ(h.parent_map[static_cast<std::size_t>(e)], e);
}

TEST(BuildHierarchy, RatioThreeParentLookup) {
    const auto h = build_hierarchy(2, 3);
    // fine cell [1/3,1/2]x[0,1/6] is cell (2,0) on the n=6 mesh
    const int e = h.fine.cell_index(2, 0);
    const auto o = h.fine.cell_origin(e);
    EXPECT_NEAR(o[0], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(o[1], 0.0, 1e-15);
    EXPECT_EQ(h.parent_map[static_cast<std::size_t>(e)], h.coarse.cell_index(0, 0));
}

TEST(BuildHierarchy, RefinementMultipliesElementsAndKeepsBoundary) {
    const auto h = build_hierarchy(3, 3);
    EXPECT_EQ(h.fine.element_count(), h.coarse.element_count() * 9);
    std::set<std::pair<double, double>> fine_boundary;
    for (int i = 0; i < h.fine.node_count(); ++i)
        if (h.fine.boundary_node[static_cast<std::size_t>(i)])
            fine_boundary.insert({h.fine.node_coords[static_cast<std::size_t>(i)][0],
                                  h.fine.node_coords[static_cast<std::size_t>(i)][1]});
    for (int i = 0; i < h.coarse.node_count(); ++i)
        if (h.coarse.boundary_node[static_cast<std::size_t>(i)])
            EXPECT_TRUE(fine_boundary.count({h.coarse.node_coords[static_cast<std::size_t>(i)][0],
                                             h.coarse.node_coords[static_cast<std::size_t>(i)][1]}));
}

TEST(Prolongation, ConstantField) {
    const auto h = build_hierarchy(2, 2);
    const ScalarDofMap cmap{ElementFamily::q2, 2};
    std::vector<double> coarse(static_cast<std::size_t>(cmap.dofs()), 3.25);
    const auto fine = prolongate_field(h, ElementFamily::q2, coarse);
    for (double v : fine) EXPECT_NEAR(v, 3.25, 1e-14);
}

TEST(Prolongation, SingleBasisFunction) {
    const auto h = build_hierarchy(2, 2);
    const ScalarDofMap cmap{ElementFamily::q1, 2};
    const ScalarDofMap fmap{ElementFamily::q1, 4};
    std::vector<double> coarse(static_cast<std::size_t>(cmap.dofs()), 0.0);
    coarse[4] = 1.0;  // center node basis function
    const auto fine = prolongate_field(h, ElementFamily::q1, coarse);
    for (int g = 0; g < fmap.dofs(); ++g) {
        const auto [x, y] = fmap.dof_point(g);
        EXPECT_NEAR(fine[static_cast<std::size_t>(g)],
                    eval_scalar_field(cmap, h.coarse, coarse, x, y), 1e-14);
    }
}

TEST(Prolongation, LinearFieldReproduced) {
    const auto h = build_hierarchy(3, 2);
    const ScalarDofMap cmap{ElementFamily::q2, 3};
    const ScalarDofMap fmap{ElementFamily::q2, 6};
    std::vector<double> coarse(static_cast<std::size_t>(cmap.dofs()));
    for (int g = 0; g < cmap.dofs(); ++g) coarse[static_cast<std::size_t>(g)] = cmap.dof_point(g)[0];
    const auto fine = prolongate_field(h, ElementFamily::q2, coarse);
    for (int g = 0; g < fmap.dofs(); ++g)
        EXPECT_NEAR(fine[static_cast<std::size_t>(g)], fmap.dof_point(g)[0], 1e-14);
}

TEST(Prolongation, DimensionMismatchRejected) {
    const auto h = build_hierarchy(2, 2);
    std::vector<double> wrong(5, 0.0);
    EXPECT_THROW(prolongate_field(h, ElementFamily::q1, wrong), std::invalid_argument);
}

TEST(Prolongation, ReproducesCoarseSpaceProperty) {
    const auto r = check_prolongation();
    EXPECT_TRUE(r.pass) << r.describe();
}

TEST(MeshDump, Format) {
    const auto m = build_uniform_mesh(1);
    std::ostringstream os;
    dump_mesh(m, os);
    EXPECT_EQ(os.str(),
              "quadmesh n=1\n"
              "v 0 0\nv 1 0\nv 0 1\nv 1 1\n"
              "q 0 1 3 2\n");
}
