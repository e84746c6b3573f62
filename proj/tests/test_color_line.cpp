#include <gtest/gtest.h>

#include "dehaze/color_line.hpp"
#include "test_support.hpp"

using namespace dehaze;
using namespace dehaze::testing;

namespace {

// Hazy patch of a single surface: I = t * l * J + (1 - t) * A, optionally with
// a fraction of random outlier pixels.
Image hazy_patch(Rng& rng, int size, const Rgb& J, double t, const Rgb& A, double outliers, double noise)
{
    Image img(size, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            Rgb c;
            if (uniform(rng) < outliers) {
                c = {uniform(rng), uniform(rng), uniform(rng)};
            } else {
                const double shade = 0.3 + 0.7 * (x + 0.5 * y) / (1.5 * size);
                c = t * shade * J + (1.0 - t) * A;
                for (double& v : c) {
                    v += gaussian(rng, noise);
                }
            }
            img.set(x, y, c);
        }
    }
    return img;
}

double point_line_distance(const Rgb& p, const ColorLine& l)
{
    const Rgb rel = p - l.p0;
    return norm(rel - dot(rel, l.dir) * l.dir);
}

}  // namespace

TEST(ColorLine, NaiveBayesHandExamples)
{
    const std::vector<double> priors{1.0, 3.0};
    const auto p = naive_bayes_posterior(priors, {{0.9}, {0.1}});
    EXPECT_NEAR(p[0], 0.75, 1e-12);
    EXPECT_NEAR(p[1], 0.25, 1e-12);

    const std::vector<double> even{0.5, 0.5};
    const auto q = naive_bayes_posterior(even, {{0.2, 0.5}, {0.4, 0.25}});
    EXPECT_NEAR(q[0], 0.5, 1e-12);

    // A zero likelihood rules a class out.
    const auto r = naive_bayes_posterior(even, {{0.0, 1.0}, {0.1, 0.1}});
    EXPECT_EQ(r[0], 0.0);
    EXPECT_EQ(r[1], 1.0);

    EXPECT_THROW(naive_bayes_posterior(even, {{0.5}}), ConfigError);
}

TEST(ColorLine, PosteriorsSumToOneAndPreferOnLinePixels)
{
    ClassifierParams params;
    const CandidateLine line{{0.2, 0.2, 0.2}, normalized({1.0, 0.5, 0.2})};
    std::vector<FeatureVector> px;
    px.push_back({{0.2, 0.2, 0.2, 0, 0}});
    px.push_back({{0.7, 0.9, 0.1, 0, 0}});
    const auto post = classify_patch_pixels(px, line, params);
    for (const auto& p : post) {
        EXPECT_NEAR(p.inlier + p.outlier, 1.0, 1e-12);
    }
    EXPECT_GT(post[0].inlier, 0.99);
    EXPECT_LT(post[1].inlier, 0.01);
}

TEST(ColorLine, RecoversLineOfHazyPatch)
{
    Rng rng(31);
    ClassifierParams params;
    for (int trial = 0; trial < 30; ++trial) {
        const Rgb J = {uniform(rng, 0.0, 0.2), uniform(rng, 0.3, 1.0), uniform(rng, 0.3, 1.0)};
        const Rgb A{0.8, 0.8, 0.8};
        const double t = uniform(rng, 0.3, 0.9);
        const Image img = hazy_patch(rng, 9, J, t, A, trial % 2 ? 0.2 : 0.0, 0.002);
        const PatchRef patch = make_patch(img, 4, 4, 4);
        const LineFit fit = fit_color_line(patch, img, params, 1234 + trial);
        ASSERT_TRUE(fit.ok()) << to_string(fit.failure);
        const ColorLine& l = *fit.line;
        EXPECT_LT(angle_deg(l.dir, J), 2.0);
        // The haze offset (1 - t) A lies on the line.
        EXPECT_LT(point_line_distance((1.0 - t) * A, l), 0.02);
        EXPECT_NEAR(dot(l.normal, A) / norm(A), 0.0, 0.05);
        EXPECT_GE(l.support, static_cast<int>(0.6 * 81));
    }
}

TEST(ColorLine, FitIsAPureFunctionOfTheSeed)
{
    Rng rng(32);
    const Image img = hazy_patch(rng, 9, {0.1, 0.5, 0.9}, 0.6, {0.8, 0.8, 0.8}, 0.3, 0.01);
    const PatchRef patch = make_patch(img, 4, 4, 4);
    const LineFit a = fit_color_line(patch, img, {}, 99);
    const LineFit b = fit_color_line(patch, img, {}, 99);
    ASSERT_EQ(a.ok(), b.ok());
    if (a.ok()) {
        EXPECT_EQ(a.line->p0, b.line->p0);
        EXPECT_EQ(a.line->inliers, b.line->inliers);
    }
}

TEST(ColorLine, DegenerateAndSmallPatches)
{
    const Image flat(9, 9, {0.4, 0.4, 0.4});
    EXPECT_EQ(fit_color_line(make_patch(flat, 4, 4, 4), flat, {}, 1).failure, LineFailure::degenerate_patch);
    const Image tiny(2, 2, {0.4, 0.4, 0.4});
    EXPECT_EQ(fit_color_line(make_patch(tiny, 0, 0, 1), tiny, {}, 1).failure, LineFailure::patch_too_small);
}

TEST(ColorLine, PureNoiseHasLowSupport)
{
    Rng rng(33);
    const Image img = random_image(rng, 9, 9);
    const LineFit fit = fit_and_validate(make_patch(img, 4, 4, 4), img, {}, 5);
    EXPECT_FALSE(fit.ok());
}

TEST(ColorLine, Unimodality)
{
    std::vector<double> two_clusters;
    for (int i = 0; i < 5; ++i) {
        two_clusters.push_back(0.0 + 0.001 * i);
        two_clusters.push_back(1.0 - 0.001 * i);
    }
    EXPECT_FALSE(is_unimodal(two_clusters, 10));

    std::vector<double> spread;
    for (int i = 0; i < 50; ++i) {
        spread.push_back(i / 49.0);
    }
    EXPECT_TRUE(is_unimodal(spread, 10));

    // A single empty bin between two busy ones is quantisation noise.
    std::vector<double> dip;
    for (int i = 0; i <= 100; ++i) {
        const double v = i / 100.0;
        if (v < 0.4 || v >= 0.5) {
            dip.push_back(v);
        }
    }
    EXPECT_TRUE(is_unimodal(dip, 10));
    EXPECT_TRUE(is_unimodal(std::vector<double>{1.0, 1.0, 1.0}, 10));
}

TEST(ColorLine, ValidationOrderAndSignFlip)
{
    ColorLine l;
    l.support = 10;
    l.dir = normalized({-0.6, -0.8, 0.0});
    l.normal = {0.0, 0.0, 1.0};
    const std::vector<double> proj{0.1, 0.2, 0.3};
    EXPECT_EQ(validate_color_line(l, 20, proj), LineFailure::none);
    EXPECT_GT(l.dir[0], 0.0);
    EXPECT_EQ(l.normal[2], -1.0);

    l.dir = normalized({0.6, -0.8, 0.0});
    EXPECT_EQ(validate_color_line(l, 20, proj), LineFailure::positive_slope);
    EXPECT_EQ(validate_color_line(l, 100, proj), LineFailure::low_support);

    // Components inside the tolerance count as either sign.
    l.dir = normalized({0.01, 0.6, 0.8});
    EXPECT_EQ(validate_color_line(l, 20, proj), LineFailure::none);
    l.dir = normalized({-0.01, 0.6, 0.8});
    EXPECT_EQ(validate_color_line(l, 20, proj), LineFailure::none);
}

TEST(ColorLine, GrowthLadderReachesLargerPatches)
{
    Rng rng(34);
    // Centre 3x3 is noise, the surrounding area a clean line.
    Image img = hazy_patch(rng, 31, {0.05, 0.4, 0.9}, 0.5, {0.8, 0.8, 0.8}, 0.0, 0.0);
    for (int y = 14; y <= 16; ++y) {
        for (int x = 14; x <= 16; ++x) {
            img.set(x, y, {uniform(rng), uniform(rng), uniform(rng)});
        }
    }
    ClassifierParams params;
    const PatchRef small = make_patch(img, 15, 15, 1);
    const LineFit grown = grow_patch_and_refit(small, img, params, 3);
    ASSERT_TRUE(grown.ok());
    EXPECT_GT(grown.patch.half_size, 1);
    EXPECT_LE(grown.patch.half_size, params.max_patch_growth);
}

TEST(ColorLine, PatchSeedDependsOnIdentity)
{
    const Image img(20, 20);
    const PatchRef a = make_patch(img, 5, 5, 3);
    const PatchRef b = make_patch(img, 6, 5, 3);
    EXPECT_EQ(patch_seed(a, 1), patch_seed(a, 1));
    EXPECT_NE(patch_seed(a, 1), patch_seed(b, 1));
    EXPECT_NE(patch_seed(a, 1), patch_seed(a, 2));
}
