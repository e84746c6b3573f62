#include <gtest/gtest.h>

#include <set>

#include "dehaze/image.hpp"
#include "test_support.hpp"

using namespace dehaze;
using namespace dehaze::testing;

TEST(Image, ConstructionFillsEveryPixel)
{
    const Image img(4, 3, {0.1, 0.2, 0.3});
    EXPECT_EQ(img.pixel_count(), 12u);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 4; ++x) {
            EXPECT_EQ(img.at(x, y), (Rgb{0.1, 0.2, 0.3}));
        }
    }
    EXPECT_THROW(Image(-1, 2), ConfigError);
    EXPECT_THROW(ScalarMap(2, -1), ConfigError);
}

TEST(Image, SetAndChannelAgree)
{
    Image img(3, 2);
    img.set(2, 1, {0.25, 0.5, 0.75});
    EXPECT_EQ(img.channel(2, 1, 0), 0.25);
    EXPECT_EQ(img.channel(2, 1, 2), 0.75);
    EXPECT_EQ(img.pixel(5), (Rgb{0.25, 0.5, 0.75}));
}

TEST(Image, ClampAndNormalizedCheck)
{
    Image img(2, 1);
    img.set(0, 0, {-0.5, 0.5, 1.5});
    EXPECT_FALSE(img.is_normalized());
    const Image c = img.clamped();
    EXPECT_TRUE(c.is_normalized());
    EXPECT_EQ(c.at(0, 0), (Rgb{0.0, 0.5, 1.0}));
}

TEST(Image, NormalizedRejectsZero)
{
    EXPECT_THROW(normalized({0.0, 0.0, 0.0}), NumericError);
    const Rgb n = normalized({3.0, 0.0, 4.0});
    EXPECT_DOUBLE_EQ(n[0], 0.6);
    EXPECT_DOUBLE_EQ(n[2], 0.8);
}

TEST(Image, FeatureVectorLayout)
{
    Image img(10, 20, {0.1, 0.2, 0.3});
    const FeatureVector f = to_feature_vector(img, 5, 10, 2.0);
    EXPECT_EQ(f.r(), 0.1);
    EXPECT_EQ(f.b(), 0.3);
    EXPECT_DOUBLE_EQ(f.sx(), 1.0);
    EXPECT_DOUBLE_EQ(f.sy(), 1.0);
    EXPECT_THROW(to_feature_vector(img, 10, 0, 1.0), BoundsError);
    EXPECT_THROW(to_feature_vector(img, 0, -1, 1.0), BoundsError);

    const FeatureVector g = to_feature_vector(img, 0, 0, 2.0);
    EXPECT_DOUBLE_EQ(f.squared_distance(g), 2.0);
}

TEST(Image, MakePatchClipsAtBorders)
{
    const Image img(10, 8);
    const PatchRef p = make_patch(img, 1, 7, 3);
    EXPECT_EQ(p.bounds, (Rect{0, 4, 5, 8}));
    EXPECT_EQ(p.bounds.area(), 20);
}

TEST(Image, IteratePatchesCoversEveryPixel)
{
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const int w = uniform_int(rng, 5, 40);
        const int h = uniform_int(rng, 5, 40);
        const int size = uniform_int(rng, 1, std::min(w, h));
        const int stride = uniform_int(rng, 1, size);
        const Image img(w, h);
        std::vector<int> hits(static_cast<std::size_t>(w) * h, 0);
        for (const PatchRef& p : iterate_patches(img, size, stride)) {
            ASSERT_GE(p.bounds.x0, 0);
            ASSERT_LE(p.bounds.x1, w);
            ASSERT_LE(p.bounds.y1, h);
            for (int y = p.bounds.y0; y < p.bounds.y1; ++y) {
                for (int x = p.bounds.x0; x < p.bounds.x1; ++x) {
                    ++hits[static_cast<std::size_t>(y) * w + x];
                }
            }
        }
        EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int c) { return c > 0; }));
    }
}

TEST(Image, IteratePatchesRejectsBadGeometry)
{
    const Image img(8, 8);
    EXPECT_THROW(iterate_patches(img, 9, 1), ConfigError);
    EXPECT_THROW(iterate_patches(img, 3, 4), ConfigError);
    EXPECT_THROW(iterate_patches(img, 0, 1), ConfigError);
}

TEST(Image, BoxBlurMatchesWindowMean)
{
    Rng rng(5);
    const Image img = random_image(rng, 9, 7);
    const int r = 2;
    const Image out = box_blur(img, r);
    for (int y = 0; y < 7; ++y) {
        for (int x = 0; x < 9; ++x) {
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                int n = 0;
                for (int yy = y - r; yy <= y + r; ++yy) {
                    for (int xx = x - r; xx <= x + r; ++xx) {
                        if (img.contains(xx, yy)) {
                            s += img.channel(xx, yy, c);
                            ++n;
                        }
                    }
                }
                EXPECT_NEAR(out.channel(x, y, c), s / n, 1e-12);
            }
        }
    }
    EXPECT_EQ(box_blur(img, 0), img);
    EXPECT_THROW(box_blur(img, -1), ConfigError);
}

TEST(Image, LumaWeights)
{
    EXPECT_NEAR(luma({1.0, 1.0, 1.0}), 0.9999, 1e-12);
    EXPECT_DOUBLE_EQ(luma({0.0, 1.0, 0.0}), 0.5870);
}
