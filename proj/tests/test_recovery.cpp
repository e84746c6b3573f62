#include <gtest/gtest.h>

#include "dehaze/recovery.hpp"
#include "dehaze/synthesis.hpp"
#include "test_support.hpp"

using namespace dehaze;
using namespace dehaze::testing;

TEST(Recovery, InvertsTheHazeModel)
{
    Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = uniform_int(rng, 4, 30);
        const int h = uniform_int(rng, 4, 30);
        SceneSpec s;
        s.radiance = random_image(rng, w, h);
        s.depth = random_map(rng, w, h, 0.0, 3.0);
        s.beta = uniform(rng, 0.2, 1.5);
        s.airlight = {uniform(rng, 0.6, 1.0), uniform(rng, 0.6, 1.0), uniform(rng, 0.6, 1.0)};
        const Image hazy = synthesize_haze(s);
        const ScalarMap t = transmission_from_depth(s.depth, s.beta);
        RecoveryParams p;
        const Image J = recover_radiance(hazy, t, s.airlight, p);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] < p.t0) {
                continue;
            }
            for (int c = 0; c < 3; ++c) {
                EXPECT_NEAR(J.pixel(i)[c], s.radiance.pixel(i)[c], 1e-12);
            }
        }
    }
}

TEST(Recovery, T0ClampBoundsAmplification)
{
    Image img(1, 1, {0.9, 0.9, 0.9});
    ScalarMap t(1, 1, 0.01);
    RecoveryParams p;
    p.t0 = 0.1;
    const Image J = recover_radiance(img, t, {0.8, 0.8, 0.8}, p);
    EXPECT_NEAR(J.at(0, 0)[0], 1.0, 1e-12);  // 0.8 + 0.1 / 0.1, clamped
    img.set(0, 0, {0.81, 0.81, 0.81});
    EXPECT_NEAR(recover_radiance(img, t, {0.8, 0.8, 0.8}, p).at(0, 0)[0], 0.9, 1e-12);
    EXPECT_THROW(recover_radiance(img, ScalarMap(2, 1), {0.8, 0.8, 0.8}, p), ConfigError);
}

TEST(Recovery, ParamRanges)
{
    RecoveryParams p;
    EXPECT_NO_THROW(p.validate());
    p.t0 = 0.01;
    EXPECT_THROW(p.validate(), ConfigError);
    p.t0 = 0.1;
    p.gamma = 5.0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Recovery, AirlightSubtractionAndContrastInvertHaze)
{
    // With a = (1 - t) |A| and the reference luma of A the restored image is J.
    Rng rng(62);
    const Rgb A{0.8, 0.8, 0.8};
    const Rgb dir = normalized(A);
    const double mag = norm(A);
    Image hazy(8, 8);
    Image J(8, 8);
    ScalarMap a(8, 8);
    for (std::size_t i = 0; i < 64; ++i) {
        const Rgb j{uniform(rng), uniform(rng), uniform(rng)};
        const double t = uniform(rng, 0.2, 1.0);
        J.set(static_cast<int>(i % 8), static_cast<int>(i / 8), j);
        hazy.set(static_cast<int>(i % 8), static_cast<int>(i / 8), t * j + (1.0 - t) * A);
        a[i] = (1.0 - t) * mag;
    }
    const Image jt = direct_transmission_component(hazy, a, dir);
    const ContrastResult r = contrast_restore(jt, a, dir, luma(mag * dir));
    EXPECT_EQ(r.saturated, 0u);
    for (std::size_t i = 0; i < 64; ++i) {
        for (int c = 0; c < 3; ++c) {
            EXPECT_NEAR(r.image.pixel(i)[c], J.pixel(i)[c], 1e-12);
        }
    }
}

TEST(Recovery, DirectComponentClampsAndContrastCountsSaturation)
{
    Image img(2, 1, {0.2, 0.5, 0.9});
    ScalarMap a(2, 1, 0.0);
    a[1] = 1.0;
    const Rgb dir = normalized({1, 1, 1});
    const Image jt = direct_transmission_component(img, a, dir);
    EXPECT_EQ(jt.at(0, 0), (Rgb{0.2, 0.5, 0.9}));
    EXPECT_EQ(jt.at(1, 0)[0], 0.0);
    ScalarMap full(2, 1, 10.0);
    const ContrastResult r = contrast_restore(jt, full, dir, 1.0);
    EXPECT_EQ(r.saturated, 2u);
    EXPECT_TRUE(r.image.is_normalized());
    EXPECT_THROW(contrast_restore(jt, a, dir, 0.0), ConfigError);
}

TEST(Recovery, GammaCorrection)
{
    Image img(1, 1, {0.25, 1.2, -0.1});
    const Image g = gamma_correct(img, 2.0);
    EXPECT_NEAR(g.at(0, 0)[0], 0.5, 1e-12);
    EXPECT_EQ(g.at(0, 0)[1], 1.0);
    EXPECT_EQ(g.at(0, 0)[2], 0.0);
    EXPECT_EQ(gamma_correct(img, 1.0), img.clamped());
    EXPECT_THROW(gamma_correct(img, 0.0), ConfigError);
}
