#include <gtest/gtest.h>

#include <set>

#include "dehaze/config.hpp"
#include "test_support.hpp"

using namespace dehaze;
using namespace dehaze::testing;

namespace {

std::string error_of(const std::string& text)
{
    try {
        load_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, DefaultsAreValid)
{
    EXPECT_NO_THROW(PipelineConfig{}.validate());
}

TEST(Config, SerializeListsEveryFieldAndRoundTrips)
{
    PipelineConfig c;
    c.patch_size = 9;
    c.t0 = 0.15;
    c.mode = RecoveryMode::transmission_recovery;
    c.spatial_features = true;
    c.seed = 42;
    c.lambda = 0.37;
    const std::string text = serialize_config(c);
    const auto keys = config_keys();
    EXPECT_EQ(std::set<std::string>(keys.begin(), keys.end()).size(), keys.size());
    for (const std::string& k : keys) {
        EXPECT_NE(text.find(k + ": "), std::string::npos) << k;
    }
    EXPECT_EQ(serialize_config(load_config(text)), text);
    EXPECT_NE(text.find("mode: trans"), std::string::npos);
}

TEST(Config, LoadAppliesOnTopOfBase)
{
    PipelineConfig base;
    base.gamma = 2.0;
    const PipelineConfig c = load_config("patch_size = 7\nmode = airlight\n", base);
    EXPECT_EQ(c.patch_size, 7);
    EXPECT_EQ(c.gamma, 2.0);
    EXPECT_EQ(c.mode, RecoveryMode::airlight_subtraction);
}

TEST(Config, UnknownKeysAreRejected)
{
    const std::string msg = error_of("patch_size = 7\npatchsize = 9\n");
    EXPECT_NE(msg.find("patchsize"), std::string::npos);
    EXPECT_NE(msg.find("line 2"), std::string::npos);
    PipelineConfig c;
    EXPECT_THROW(set_config_field(c, "nope", "1"), ConfigError);
}

TEST(Config, OutOfRangeValuesNameTheField)
{
    const std::vector<std::pair<std::string, std::string>> bad = {
        {"patch_size", "4"},       {"patch_size", "1"},        {"t0", "0.5"},
        {"gamma", "0.1"},          {"threads", "0"},           {"mode", "fast"},
        {"anchor_window", "2"},    {"anchor_top_fraction", "0"}, {"inlier_sigma", "-1"},
        {"line_stride", "100"},    {"solver_tol", "0"},        {"alpha", "-1"},
        {"beta", "-0.5"},          {"spatial_features", "2"},  {"min_airlight_transmission", "0.5"},
    };
    for (const auto& [key, value] : bad) {
        const std::string msg = error_of(key + " = " + value + "\n");
        EXPECT_NE(msg.find(key), std::string::npos) << key << " = " << value << " gave '" << msg << "'";
    }
}

TEST(Config, RandomValidConfigsRoundTrip)
{
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        PipelineConfig c;
        c.patch_size = 3 + 2 * uniform_int(rng, 0, 10);
        c.anchor_window = 1 + 2 * uniform_int(rng, 0, 5);
        c.anchor_top_fraction = uniform(rng, 0.01, 1.0);
        c.lambda = uniform(rng, 0.0, 2.0);
        c.alpha = uniform(rng, 0.0, 2.0);
        c.beta = uniform(rng, 0.0, 0.1);
        c.t0 = uniform(rng, 0.05, 0.2);
        c.gamma = uniform(rng, 0.3, 3.0);
        c.threads = uniform_int(rng, 1, 8);
        c.seed = rng();
        c.mode = trial % 2 ? RecoveryMode::airlight_subtraction : RecoveryMode::transmission_recovery;
        ASSERT_NO_THROW(c.validate());
        const PipelineConfig back = load_config(serialize_config(c));
        EXPECT_EQ(serialize_config(back), serialize_config(c));
        EXPECT_EQ(back.lambda, c.lambda);
        EXPECT_EQ(back.seed, c.seed);
    }
}

TEST(Config, RecoveryModeNames)
{
    EXPECT_EQ(to_string(RecoveryMode::transmission_recovery), "trans");
    EXPECT_EQ(to_string(RecoveryMode::airlight_subtraction), "airlight");
    EXPECT_EQ(parse_recovery_mode("trans"), RecoveryMode::transmission_recovery);
    EXPECT_THROW(parse_recovery_mode("x"), ConfigError);
}

TEST(Config, DerivedParameterBlocks)
{
    PipelineConfig c;
    c.max_line_patch_size = 31;
    c.lambda_reg = 0.3;
    EXPECT_EQ(c.classifier().max_patch_growth, 15);
    EXPECT_EQ(c.classifier().feature_lambda, 0.3);
    EXPECT_EQ(c.dcp().patch_size, c.patch_size);
    EXPECT_EQ(c.interpolation().alpha, c.alpha);
    EXPECT_EQ(c.recovery().t0, c.t0);
}
