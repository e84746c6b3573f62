#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dehaze {

struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
};

/// Parses `key = value` or `key: value` lines. Blank lines and lines starting
/// with '#' are skipped. Throws ConfigError(stage) for a line without a
/// separator, an empty key, or a repeated key.
std::vector<KeyValue> parse_key_values(std::string_view text, const std::string& stage);

// Field parsers; each throws ConfigError(stage) naming the key on bad input.
double parse_real(const KeyValue& kv, const std::string& stage);
long long parse_integer(const KeyValue& kv, const std::string& stage);
bool parse_bool(const KeyValue& kv, const std::string& stage);
std::array<double, 3> parse_triple(const KeyValue& kv, const std::string& stage);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

}  // namespace dehaze
