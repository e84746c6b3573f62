#include <gtest/gtest.h>

#include "dehaze/linalg3.hpp"
#include "test_support.hpp"

using namespace dehaze;
using namespace dehaze::testing;

namespace {

Mat3 multiply(const Mat3& a, const Mat3& b)
{
    Mat3 m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return m;
}

Rgb mat_vec(const Mat3& m, const Rgb& v)
{
    return {dot(m[0], v), dot(m[1], v), dot(m[2], v)};
}

}  // namespace

TEST(Linalg3, DiagonalMatrix)
{
    const Mat3 m{{{3.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 2.0}}};
    const SymEigen3 e = sym_eigen3(m);
    EXPECT_NEAR(e.values[0], 1.0, 1e-12);
    EXPECT_NEAR(e.values[1], 2.0, 1e-12);
    EXPECT_NEAR(e.values[2], 3.0, 1e-12);
    EXPECT_NEAR(std::abs(e.vectors[0][1]), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(e.vectors[2][0]), 1.0, 1e-12);
}

TEST(Linalg3, RandomSymmetricReconstruction)
{
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        // Random rotation from three orthonormalised vectors and random spectrum,
        // with repeated eigenvalues every few trials.
        const Rgb u = random_unit(rng);
        const Rgb v = normalized(cross(u, random_unit(rng)));
        const Rgb w = cross(u, v);
        std::array<double, 3> lam{uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)};
        if (trial % 5 == 0) {
            lam[1] = lam[0];
        }
        Mat3 m{};
        const std::array<Rgb, 3> basis{u, v, w};
        for (int k = 0; k < 3; ++k) {
            const Mat3 o = outer(basis[k], basis[k]);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    m[i][j] += lam[k] * o[i][j];
                }
            }
        }
        const SymEigen3 e = sym_eigen3(m);
        std::sort(lam.begin(), lam.end());
        for (int k = 0; k < 3; ++k) {
            EXPECT_NEAR(e.values[k], lam[k], 1e-9);
            EXPECT_NEAR(norm(e.vectors[k]), 1.0, 1e-9);
            const Rgb mv = mat_vec(m, e.vectors[k]);
            EXPECT_LT(norm(mv - e.values[k] * e.vectors[k]), 1e-8);
        }
        EXPECT_NEAR(dot(e.vectors[0], e.vectors[1]), 0.0, 1e-8);
        EXPECT_NEAR(dot(e.vectors[0], e.vectors[2]), 0.0, 1e-8);
    }
}

TEST(Linalg3, OuterProduct)
{
    const Mat3 o = outer({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0});
    EXPECT_EQ(o[1][2], 12.0);
    EXPECT_EQ(o[2][0], 12.0);
    const Mat3 sq = multiply(outer({1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}), outer({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}));
    EXPECT_EQ(sq[0][1], 1.0);
}
