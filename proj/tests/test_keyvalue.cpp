#include <gtest/gtest.h>

#include <cmath>

#include "dehaze/error.hpp"
#include "dehaze/keyvalue.hpp"
#include "test_support.hpp"

using namespace dehaze;
using namespace dehaze::testing;

TEST(KeyValue, ParsesBothSeparatorsAndComments)
{
    const auto kv = parse_key_values("# header\n\n a = 1 \nb: two words\n  # indented comment\nc=3\n", "t");
    ASSERT_EQ(kv.size(), 3u);
    EXPECT_EQ(kv[0].key, "a");
    EXPECT_EQ(kv[0].value, "1");
    EXPECT_EQ(kv[0].line, 3);
    EXPECT_EQ(kv[1].value, "two words");
    EXPECT_EQ(kv[2].key, "c");
}

TEST(KeyValue, RejectsMalformedLines)
{
    EXPECT_THROW(parse_key_values("novalue\n", "t"), ConfigError);
    EXPECT_THROW(parse_key_values("= 3\n", "t"), ConfigError);
    EXPECT_THROW(parse_key_values("a = 1\na = 2\n", "t"), ConfigError);
}

TEST(KeyValue, FieldParsers)
{
    const KeyValue real{"x", "0.25", 1};
    EXPECT_EQ(parse_real(real, "t"), 0.25);
    EXPECT_THROW(parse_real({"x", "0.25abc", 1}, "t"), ConfigError);
    EXPECT_THROW(parse_real({"x", "nan", 1}, "t"), ConfigError);
    EXPECT_EQ(parse_integer({"n", "-12", 1}, "t"), -12);
    EXPECT_THROW(parse_integer({"n", "1.5", 1}, "t"), ConfigError);
    EXPECT_TRUE(parse_bool({"b", "true", 1}, "t"));
    EXPECT_FALSE(parse_bool({"b", "0", 1}, "t"));
    EXPECT_THROW(parse_bool({"b", "maybe", 1}, "t"), ConfigError);
    EXPECT_EQ(parse_triple({"a", "0.1, 0.2,0.3", 1}, "t"), (std::array<double, 3>{0.1, 0.2, 0.3}));
    EXPECT_EQ(parse_triple({"a", "0.1 0.2 0.3", 1}, "t"), (std::array<double, 3>{0.1, 0.2, 0.3}));
    EXPECT_THROW(parse_triple({"a", "0.1 0.2", 1}, "t"), ConfigError);
    EXPECT_THROW(parse_triple({"a", "0.1 0.2 0.3 0.4", 1}, "t"), ConfigError);
}

TEST(KeyValue, ErrorsNameTheKey)
{
    try {
        parse_real({"solver_tol", "fast", 4}, "config");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("solver_tol"), std::string::npos);
        EXPECT_EQ(e.stage(), "config");
    }
}

TEST(KeyValue, FormatRealRoundTrips)
{
    Rng rng(91);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::ldexp(uniform(rng, -1.0, 1.0), uniform_int(rng, -40, 40));
        const KeyValue kv{"v", format_real(v), 1};
        EXPECT_EQ(parse_real(kv, "t"), v);
    }
    EXPECT_EQ(format_real(0.1), "0.1");
    EXPECT_EQ(format_real(1.0), "1");
}
