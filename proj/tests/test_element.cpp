#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "mcrs/checks.hpp"
#include "mcrs/element.hpp"

using namespace mcrs;

TEST(ShapeEval, Q1Center) {
    const ReferenceElement q1{ElementFamily::q1};
    std::array<double, 4> v{};
    q1.eval(0.0, 0.0, v);
    for (double s : v) EXPECT_DOUBLE_EQ(s, 0.25);
}

TEST(ShapeEval, NodalProperty) {
    for (ElementFamily fam : {ElementFamily::q1, ElementFamily::q2}) {
        const ReferenceElement elem{fam};
        std::vector<double> v(static_cast<std::size_t>(elem.dof_count()));
        for (int i = 0; i < elem.dof_count(); ++i) {
            const auto p = elem.node(i);
            elem.eval(p[0], p[1], v);
            for (int j = 0; j < elem.dof_count(); ++j)
                EXPECT_NEAR(v[static_cast<std::size_t>(j)], i == j ? 1.0 : 0.0, 1e-14);
        }
    }
}

TEST(ShapeEval, PartitionOfUnity) {
    for (ElementFamily fam : {ElementFamily::q1, ElementFamily::q2}) {
        const ReferenceElement elem{fam};
        std::vector<double> v(static_cast<std::size_t>(elem.dof_count()));
        for (double xi : {-0.9, -0.2, 0.0, 0.5, 1.0})
            for (double eta : {-1.0, -0.4, 0.3, 0.8}) {
                elem.eval(xi, eta, v);
                double s = 0.0;
                for (double x : v) s += x;
                EXPECT_NEAR(s, 1.0, 1e-14);
            }
    }
}

// hand oracle: 1D Lagrange values at nodes {-1, 0, 1}
TEST(ShapeEval, Q2AgainstTensorOracle) {
    const ReferenceElement q2{ElementFamily::q2};
    const double xi = 0.5, eta = -1.0 / 3.0;
    auto l = [](int i, double t) {
        switch (i) {
            case 0: return 0.5 * t * (t - 1.0);
            case 1: return 1.0 - t * t;
            default: return 0.5 * t * (t + 1.0);
        }
    };
    std::array<double, 9> v{};
    q2.eval(xi, eta, v);
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a)
            EXPECT_NEAR(v[static_cast<std::size_t>(b * 3 + a)], l(a, xi) * l(b, eta), 1e-15);
}

TEST(ShapeGrad, GradientsOfPartitionSumToZero) {
    for (ElementFamily fam : {ElementFamily::q1, ElementFamily::q2}) {
        const ReferenceElement elem{fam};
        std::vector<std::array<double, 2>> g(static_cast<std::size_t>(elem.dof_count()));
        elem.grad(0.37, -0.58, g);
        double sx = 0.0, sy = 0.0;
        for (const auto& gi : g) {
            sx += gi[0];
            sy += gi[1];
        }
        EXPECT_NEAR(sx, 0.0, 1e-14);
        EXPECT_NEAR(sy, 0.0, 1e-14);
    }
}

TEST(ShapeGrad, Q1CornerAtCenter) {
    const ReferenceElement q1{ElementFamily::q1};
    std::array<std::array<double, 2>, 4> g{};
    q1.grad(0.0, 0.0, g);
    EXPECT_DOUBLE_EQ(g[0][0], -0.25);
    EXPECT_DOUBLE_EQ(g[0][1], -0.25);
}

TEST(ShapeGrad, FiniteDifferenceCheck) {
    const auto r = check_shape_gradients();
    EXPECT_TRUE(r.pass) << r.describe();
}

TEST(Quadrature, WeightsSumToReferenceArea) {
    const auto& rule = QuadratureRule::gauss3x3();
    double s = 0.0;
    for (double w : rule.weights) {
        EXPECT_GT(w, 0.0);
        s += w;
    }
    EXPECT_NEAR(s, 4.0, 1e-14);
}

TEST(Quadrature, ExactOnDegreeFive) {
    const auto r = check_quadrature_exactness();
    EXPECT_TRUE(r.pass) << r.describe();
}
