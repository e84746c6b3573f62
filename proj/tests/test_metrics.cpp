#include <gtest/gtest.h>

#include "dehaze/metrics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace dehaze;
using namespace dehaze::testing;

TEST(Metrics, IdenticalPairs)
{
    Rng rng(81);
    for (int trial = 0; trial < 10; ++trial) {
        const Image img = random_image(rng, uniform_int(rng, 11, 30), uniform_int(rng, 11, 30));
        EXPECT_EQ(mse(img, img), 0.0);
        EXPECT_NEAR(ssim(img, img), 1.0, 1e-9);
        EXPECT_EQ(psnr(img, img), kPsnrCap);
        EXPECT_EQ(wsnr(img, img), kPsnrCap);
    }
}

TEST(Metrics, MatchDoubleLoopOracles)
{
    Rng rng(82);
    for (int trial = 0; trial < 10; ++trial) {
        const int w = uniform_int(rng, 11, 25);
        const int h = uniform_int(rng, 11, 25);
        const Image a = random_image(rng, w, h);
        Image b = a;
        for (double& v : b.data()) {
            v = std::clamp(v + gaussian(rng, 0.1), 0.0, 1.0);
        }
        EXPECT_NEAR(mse(a, b), mse_oracle(a, b), 1e-12);
        EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-9);
        EXPECT_NEAR(wsnr(a, b, 1.0), wsnr_oracle(a, b, 1.0), 1e-9);
        EXPECT_NEAR(psnr(a, b, 255.0), 10 * std::log10(255.0 * 255.0 / mse_oracle(a, b)), 1e-9);
    }
}

TEST(Metrics, HandValues)
{
    const Image a(11, 11, {0.5, 0.5, 0.5});
    const Image b(11, 11, {0.6, 0.6, 0.6});
    EXPECT_NEAR(mse(a, b), 0.01, 1e-15);
    EXPECT_NEAR(psnr(a, b), 20.0, 1e-9);
    // Flat images: only the luminance term differs from one.
    const double ya = luma({0.5, 0.5, 0.5});
    const double yb = luma({0.6, 0.6, 0.6});
    EXPECT_NEAR(ssim(a, b), (2 * ya * yb + 1e-4) / (ya * ya + yb * yb + 1e-4), 1e-12);
    // No reference gradient: uniform weights, so WSNR equals PSNR.
    EXPECT_NEAR(wsnr(b, a), psnr(b, a), 1e-12);
}

TEST(Metrics, SsimIsSymmetricAndBounded)
{
    Rng rng(83);
    for (int trial = 0; trial < 10; ++trial) {
        const Image a = random_image(rng, 16, 16);
        const Image b = random_image(rng, 16, 16);
        const double s = ssim(a, b);
        EXPECT_NEAR(s, ssim(b, a), 1e-12);
        EXPECT_LE(s, 1.0);
        EXPECT_GE(s, -1.0);
    }
}

TEST(Metrics, PreconditionErrors)
{
    EXPECT_THROW(mse(Image(3, 3), Image(3, 4)), ConfigError);
    EXPECT_THROW(ssim(Image(10, 20), Image(10, 20)), ConfigError);
    const ScalarMap t(4, 4, 0.5);
    const std::vector<std::uint8_t> none(16, 0);
    EXPECT_THROW(l1_transmission_error(t, t, none), ConfigError);
}

TEST(Metrics, L1AndMaskCoverage)
{
    ScalarMap est(4, 1);
    ScalarMap truth(4, 1);
    truth[0] = 0.01;  // sky
    truth[1] = 0.5;
    truth[2] = 0.6;
    truth[3] = 0.7;
    est[0] = 0.5;
    est[1] = 0.6;
    est[2] = 0.6;
    est[3] = 0.5;
    const std::vector<std::uint8_t> all(4, 1);
    EXPECT_NEAR(l1_transmission_error(est, truth, all), (0.49 + 0.1 + 0.0 + 0.2) / 4, 1e-15);

    const Image img(11, 11);
    ScalarMap t_est(11, 11, 0.5);
    ScalarMap t_true(11, 11, 0.5);
    for (int x = 0; x < 11; ++x) {
        t_true.at(x, 0) = 0.01;
    }
    EvaluationOptions opts;
    opts.mask_sky = true;
    const QualityReport r = evaluate_pair(img, img, &t_est, &t_true, opts);
    ASSERT_TRUE(r.l1_transmission.has_value());
    EXPECT_EQ(*r.l1_transmission, 0.0);
    EXPECT_NEAR(r.mask_coverage, 110.0 / 121.0, 1e-15);
    const QualityReport unmasked = evaluate_pair(img, img, &t_est, &t_true);
    EXPECT_EQ(unmasked.mask_coverage, 1.0);
    EXPECT_NEAR(*unmasked.l1_transmission, 11 * 0.49 / 121.0, 1e-12);
}

TEST(Metrics, ReportRoundTripAndMean)
{
    QualityReport a;
    a.mse = 0.0123;
    a.psnr = 19.1;
    a.ssim = 0.93;
    a.wsnr = 21.5;
    a.l1_transmission = 0.07;
    a.mask_coverage = 0.75;
    const std::string text = serialize_report(a);
    EXPECT_NE(text.find("mask_coverage: 0.75"), std::string::npos);
    const QualityReport back = parse_report(text);
    EXPECT_EQ(back.mse, a.mse);
    EXPECT_EQ(back.l1_transmission, a.l1_transmission);
    EXPECT_EQ(serialize_report(back), text);

    QualityReport b;
    b.mse = 0.0277;
    const std::vector<QualityReport> both{a, b};
    const QualityReport m = mean_report(both);
    EXPECT_NEAR(m.mse, 0.02, 1e-15);
    EXPECT_EQ(m.l1_transmission, 0.07);
    EXPECT_NEAR(m.mask_coverage, 0.875, 1e-15);
    EXPECT_THROW(parse_report("bogus: 1\n"), ConfigError);
}
