#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "mcrs/assembly.hpp"
#include "mcrs/checks.hpp"
#include "mcrs/dense_check.hpp"
#include "mcrs/solver.hpp"

using namespace mcrs;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST(Mass, UnitCellQ1Entries) {
    const auto mesh = build_uniform_mesh(1);
    const auto m = assemble_scalar_mass(mesh, ElementFamily::q1);
    double total = 0.0;
    for (double v : m.values()) total += v;
    EXPECT_NEAR(total, 1.0, 1e-14);  // integral of 1 over the unit square
    EXPECT_NEAR(m.value_at(0, 0), 1.0 / 9.0, 1e-15);
    EXPECT_NEAR(m.value_at(0, 1), 1.0 / 18.0, 1e-15);
    EXPECT_NEAR(m.value_at(0, 3), 1.0 / 36.0, 1e-15);
}

TEST(Mass, SymmetricPositiveDefinite) {
    const auto space = make_mixed_space(build_uniform_mesh(3));
    const auto m = assemble_mass(space);
    for (int r = 0; r < m.rows(); ++r)
        for (int k = m.row_offsets()[r]; k < m.row_offsets()[static_cast<std::size_t>(r) + 1]; ++k)
            EXPECT_NEAR(m.values()[static_cast<std::size_t>(k)],
                        m.value_at(m.col_indices()[static_cast<std::size_t>(k)], r), 1e-14);
    for (unsigned s = 0; s < 20; ++s) {
        const auto x = random_vec(static_cast<std::size_t>(m.rows()), 100 + s);
        EXPECT_GT(m.quadratic_form(x, x), 0.0);
    }
}

TEST(Stiffness, ConstantFieldInKernel) {
    const auto space = make_mixed_space(build_uniform_mesh(2));
    const auto a = assemble_stiffness(space, 0.7);
    const std::vector<double> c(static_cast<std::size_t>(space.velocity_dofs()), 2.5);
    for (double v : a.apply(c)) EXPECT_NEAR(v, 0.0, 1e-13);
}

TEST(Stiffness, UnitCellQ1Diagonal) {
    const auto mesh = build_uniform_mesh(1);
    const auto a = assemble_scalar_stiffness(mesh, ElementFamily::q1, 1.0);
    EXPECT_NEAR(a.value_at(0, 0), 2.0 / 3.0, 1e-15);
}

TEST(Stiffness, LinearInViscosity) {
    const auto space = make_mixed_space(build_uniform_mesh(2));
    const auto a1 = assemble_stiffness(space, 1.0);
    const auto a2 = assemble_stiffness(space, 2.0);
    for (std::size_t k = 0; k < a1.values().size(); ++k)
        EXPECT_NEAR(a2.values()[k], 2.0 * a1.values()[k], 1e-14);
}

TEST(Stiffness, RejectsNonPositiveViscosity) {
    const auto space = make_mixed_space(build_uniform_mesh(1));
    EXPECT_THROW(assemble_stiffness(space, 0.0), std::invalid_argument);
    EXPECT_THROW(assemble_stiffness(space, -1.0), std::invalid_argument);
}

TEST(Divergence, ConstantVelocityIsFree) {
    const auto space = make_mixed_space(build_uniform_mesh(2));
    const auto b = assemble_divergence(space);
    const std::vector<double> c(static_cast<std::size_t>(space.velocity_dofs()), 1.0);
    for (double v : b.apply(c)) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(Divergence, LinearSolenoidalFieldIsFree) {
    const auto space = make_mixed_space(build_uniform_mesh(3));
    const auto b = assemble_divergence(space);
    const int vs = space.velocity_scalar.dofs();
    std::vector<double> u(static_cast<std::size_t>(2 * vs));
    for (int g = 0; g < vs; ++g) {
        const auto p = space.velocity_scalar.dof_point(g);
        u[static_cast<std::size_t>(g)] = p[0];        // u = (x, -y)
        u[static_cast<std::size_t>(vs + g)] = -p[1];
    }
    for (double v : b.apply(u)) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Divergence, ElementwiseRowsIntegrateDivergence) {
    const auto space = make_mixed_space(build_uniform_mesh(2), PressureSpaceKind::q1_plus_q0);
    const auto b = assemble_divergence(space);
    const int vs = space.velocity_scalar.dofs();
    std::vector<double> u(static_cast<std::size_t>(2 * vs), 0.0);
    for (int g = 0; g < vs; ++g) u[static_cast<std::size_t>(g)] = space.velocity_scalar.dof_point(g)[0];
    const auto bu = b.apply(u);  // u = (x, 0): each Q0 row gives the cell area
    const double area = space.mesh.spacing * space.mesh.spacing;
    for (int e = 0; e < space.mesh.element_count(); ++e)
        EXPECT_NEAR(bu[static_cast<std::size_t>(space.q0_offset() + e)], area, 1e-14);
}

TEST(Convection, ZeroAdvectingField) {
    const auto space = make_mixed_space(build_uniform_mesh(2));
    const std::vector<double> w(static_cast<std::size_t>(space.velocity_dofs()), 0.0);
    const auto n = assemble_convection(space, w);
    for (double v : n.values()) EXPECT_EQ(v, 0.0);
}

TEST(Convection, SkewSymmetryProperty) {
    const auto r = check_skew_symmetry(4, 25);
    EXPECT_TRUE(r.pass) << r.describe();
}

TEST(Convection, MatrixAntisymmetryOnRandomPairs) {
    const auto space = make_mixed_space(build_uniform_mesh(3));
    const auto w = random_vec(static_cast<std::size_t>(space.velocity_dofs()), 7);
    const auto n = assemble_convection(space, w);
    const auto u = random_vec(static_cast<std::size_t>(space.velocity_dofs()), 8);
    const auto v = random_vec(static_cast<std::size_t>(space.velocity_dofs()), 9);
    const double uv = n.quadratic_form(u, v);
    const double vu = n.quadratic_form(v, u);
    double scale = 0.0;
    for (double x : u) scale += x * x;
    EXPECT_NEAR(uv + vu, 0.0, 1e-11 * scale);
}

TEST(Convection, UnitCellAgainstDenseOracle) {
    const auto space = make_mixed_space(build_uniform_mesh(1));
    std::vector<double> w(static_cast<std::size_t>(space.velocity_dofs()), 0.0);
    for (int g = 0; g < space.velocity_scalar.dofs(); ++g) w[static_cast<std::size_t>(g)] = 1.0;  // w = (1,0)
    EXPECT_LE(dense_check::max_abs_diff(dense_check::convection(space, w),
                                        assemble_convection(space, w)),
              1e-13);
}

TEST(Assembly, DenseOracleEquivalenceOnTwoByTwo) {
    const auto r = check_assembly_oracle();
    EXPECT_TRUE(r.pass) << r.describe();
}

TEST(Assembly, DenseOracleEquivalenceEnrichedPressure) {
    const auto space = make_mixed_space(build_uniform_mesh(2), PressureSpaceKind::q1_plus_q0);
    EXPECT_LE(dense_check::max_abs_diff(dense_check::divergence(space), assemble_divergence(space)),
              1e-12);
}

TEST(Project, ZeroFieldGivesZeroCoefficients) {
    const auto space = make_mixed_space(build_uniform_mesh(2));
    const SpdSolver mass(assemble_scalar_mass(space.mesh, ElementFamily::q2));
    const auto c = l2_project_velocity(space, [](double, double) { return std::array<double, 2>{0.0, 0.0}; },
                                       mass, 1e-12);
    for (double v : c) EXPECT_EQ(v, 0.0);
}

TEST(Project, TrigVortexInitialConditionProjectsToZero) {
    // the trig vortex vanishes identically at t = 0
    const auto space = make_mixed_space(build_uniform_mesh(4));
    const SpdSolver mass(assemble_scalar_mass(space.mesh, ElementFamily::q2));
    const TrigVortexSolution sol;
    const auto c = l2_project_velocity(
        space,
        [&sol](double x, double y) {
            const Vec2 u = sol.velocity(0.0, x, y);
            return std::array<double, 2>{u.x, u.y};
        },
        mass, 1e-12);
    for (double v : c) EXPECT_EQ(v, 0.0);
}

TEST(Project, FieldInSpaceRecoversInterpolant) {
    const auto mesh = build_uniform_mesh(1);
    const ScalarDofMap map{ElementFamily::q2, 1};
    const auto mass = assemble_scalar_mass(mesh, ElementFamily::q2);
    const auto load = assemble_scalar_load(mesh, ElementFamily::q2,
                                           [](double x, double y) { return x * x * y; });
    const auto c = SpdSolver(mass).solve(load, 1e-12);
    for (int g = 0; g < map.dofs(); ++g) {
        const auto p = map.dof_point(g);
        EXPECT_NEAR(c[static_cast<std::size_t>(g)], p[0] * p[0] * p[1], 1e-12);
    }
}

TEST(Project, GalerkinOrthogonality) {
    const auto mesh = build_uniform_mesh(3);
    const auto mass = assemble_scalar_mass(mesh, ElementFamily::q2);
    const auto load = assemble_scalar_load(mesh, ElementFamily::q2, [](double x, double y) {
        return std::sin(1.7 * x + 0.3) * std::cos(2.1 * y);
    });
    const auto proj = SpdSolver(mass).solve(load, 1e-12);
    const auto v = random_vec(proj.size(), 42);
    const double lhs = mass.quadratic_form(v, proj);
    double rhs = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) rhs += load[i] * v[i];
    EXPECT_NEAR(lhs, rhs, 1e-11 * std::abs(rhs));
}

TEST(Project, EnrichedPressureGramSolveReproducesField) {
    // x - 1/2 has zero mean and lies in the Q1 part; the gauge-fixed
    // bordered solve must reproduce it as a function
    const auto space = make_mixed_space(build_uniform_mesh(3), PressureSpaceKind::q1_plus_q0);
    const auto c = l2_project_pressure(space, [](double x, double) { return x - 0.5; }, 1e-12);
    const int q1_dofs = space.pressure_q1.dofs();
    for (double x : {0.15, 0.4, 0.85})
        for (double y : {0.2, 0.7}) {
            double v = eval_scalar_field(space.pressure_q1, space.mesh,
                                         std::span<const double>(c.data(), static_cast<std::size_t>(q1_dofs)), x, y);
            const int n = space.mesh.n;
            const int cell = static_cast<int>(y * n) * n + static_cast<int>(x * n);
            v += c[static_cast<std::size_t>(space.q0_offset() + cell)];
            EXPECT_NEAR(v, x - 0.5, 1e-10);
        }
}

TEST(Dirichlet, AllInteriorMaskLeavesSystemUnchanged) {
    const auto mesh = build_uniform_mesh(2);
    auto a = assemble_scalar_stiffness(mesh, ElementFamily::q1, 1.0);
    const auto before = a.values();
    std::vector<double> rhs(static_cast<std::size_t>(a.rows()), 1.0);
    const std::vector<std::uint8_t> mask(static_cast<std::size_t>(a.rows()), 0);
    apply_dirichlet(a, rhs, mask);
    EXPECT_EQ(a.values(), before);
    for (double v : rhs) EXPECT_EQ(v, 1.0);
}

TEST(Dirichlet, AllBoundaryUnitCellForcesZeroSolution) {
    const auto mesh = build_uniform_mesh(1);
    auto a = assemble_scalar_stiffness(mesh, ElementFamily::q1, 1.0);
    auto m = assemble_scalar_mass(mesh, ElementFamily::q1);
    auto k = csr_add(1.0, a, 1.0, m);  // SPD
    std::vector<double> rhs(4, 5.0);
    const std::vector<std::uint8_t> mask(4, 1);  // every node on the boundary
    apply_dirichlet(k, rhs, mask);
    const auto x = SpdSolver(k).solve(rhs, 1e-12);
    for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST(Dirichlet, MixedMaskMatchesDenseElimination) {
    const auto mesh = build_uniform_mesh(2);
    const ScalarDofMap map{ElementFamily::q1, 2};
    auto a = assemble_scalar_stiffness(mesh, ElementFamily::q1, 1.0);
    auto m = assemble_scalar_mass(mesh, ElementFamily::q1);
    auto k = csr_add(1.0, a, 0.5, m);
    const int nd = k.rows();
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(nd, nd);
    for (int r = 0; r < nd; ++r)
        for (int c = 0; c < nd; ++c) dense(r, c) = k.value_at(r, c);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(nd), 0);
    for (int g = 0; g < nd; ++g) mask[static_cast<std::size_t>(g)] = map.dof_on_boundary(g) ? 1 : 0;
    std::vector<double> rhs(static_cast<std::size_t>(nd));
    for (int i = 0; i < nd; ++i) rhs[static_cast<std::size_t>(i)] = 0.3 + 0.1 * i;

    // oracle: delete masked rows/columns, solve the reduced dense system
    std::vector<int> free;
    for (int i = 0; i < nd; ++i)
        if (!mask[static_cast<std::size_t>(i)]) free.push_back(i);
    Eigen::MatrixXd red(free.size(), free.size());
    Eigen::VectorXd rrhs(free.size());
    for (std::size_t i = 0; i < free.size(); ++i) {
        rrhs(static_cast<Eigen::Index>(i)) = rhs[static_cast<std::size_t>(free[i])];
        for (std::size_t j = 0; j < free.size(); ++j)
            red(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dense(free[i], free[j]);
    }
    const Eigen::VectorXd xred = red.fullPivLu().solve(rrhs);

    auto rhs2 = rhs;
    apply_dirichlet(k, rhs2, mask);
    const auto x = SpdSolver(k).solve(rhs2, 1e-12);
    for (std::size_t i = 0; i < free.size(); ++i)
        EXPECT_NEAR(x[static_cast<std::size_t>(free[i])], xred(static_cast<Eigen::Index>(i)), 1e-12);
    for (int i = 0; i < nd; ++i)
        if (mask[static_cast<std::size_t>(i)]) EXPECT_EQ(x[static_cast<std::size_t>(i)], 0.0);
}

TEST(Dump, TripletFormat) {
    CsrMatrix m = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.5}, {1, 0, -2.0}});
    std::ostringstream os;
    m.dump_triplets(os);
    EXPECT_EQ(os.str(), "0 0 1.5\n1 0 -2\n");
}
