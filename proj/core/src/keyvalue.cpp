#include "dehaze/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "dehaze/error.hpp"

namespace dehaze {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(const KeyValue& kv, const std::string& stage, const std::string& what)
{
    throw ConfigError(stage, "line " + std::to_string(kv.line) + ": '" + kv.key + "' " + what + " (got '" +
                                 kv.value + "')");
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text, const std::string& stage)
{
    std::vector<KeyValue> out;
    std::set<std::string, std::less<>> seen;
    int line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto sep = line.find_first_of("=:");
        if (sep == std::string_view::npos) {
            throw ConfigError(stage, "line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        KeyValue kv{std::string(trim(line.substr(0, sep))), std::string(trim(line.substr(sep + 1))), line_no};
        if (kv.key.empty()) {
            throw ConfigError(stage, "line " + std::to_string(line_no) + ": empty key");
        }
        if (!seen.insert(kv.key).second) {
            throw ConfigError(stage, "line " + std::to_string(line_no) + ": duplicate key '" + kv.key + "'");
        }
        out.push_back(std::move(kv));
    }
    return out;
}

double parse_real(const KeyValue& kv, const std::string& stage)
{
    double v = 0.0;
    const char* end = kv.value.data() + kv.value.size();
    const auto [ptr, ec] = std::from_chars(kv.value.data(), end, v);
    if (ec != std::errc{} || ptr != end || kv.value.empty() || !std::isfinite(v)) {
        bad(kv, stage, "expects a finite number");
    }
    return v;
}

long long parse_integer(const KeyValue& kv, const std::string& stage)
{
    long long v = 0;
    const char* end = kv.value.data() + kv.value.size();
    const auto [ptr, ec] = std::from_chars(kv.value.data(), end, v);
    if (ec != std::errc{} || ptr != end || kv.value.empty()) {
        bad(kv, stage, "expects an integer");
    }
    return v;
}

bool parse_bool(const KeyValue& kv, const std::string& stage)
{
    if (kv.value == "true" || kv.value == "1" || kv.value == "yes") {
        return true;
    }
    if (kv.value == "false" || kv.value == "0" || kv.value == "no") {
        return false;
    }
    bad(kv, stage, "expects true or false");
}

std::array<double, 3> parse_triple(const KeyValue& kv, const std::string& stage)
{
    std::string text = kv.value;
    for (char& ch : text) {
        if (ch == ',') {
            ch = ' ';
        }
    }
    std::array<double, 3> v{};
    std::istringstream in(text);
    std::string tok;
    int n = 0;
    while (in >> tok) {
        if (n == 3) {
            bad(kv, stage, "expects three numbers");
        }
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v[n]);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            bad(kv, stage, "expects three numbers");
        }
        ++n;
    }
    if (n != 3) {
        bad(kv, stage, "expects three numbers");
    }
    return v;
}

std::string format_real(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace dehaze
