#include "dehaze/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dehaze/keyvalue.hpp"

namespace dehaze {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

double unit_uniform(std::uint64_t h) { return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53; }

double hash_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return unit_uniform(splitmix64(splitmix64(seed ^ splitmix64(a)) + b));
}

}  // namespace

void SceneSpec::validate() const
{
    if (radiance.empty() || !depth.same_shape(radiance)) {
        throw ConfigError("synthesis", "radiance and depth must be non-empty and the same size");
    }
    if (std::any_of(depth.values().begin(), depth.values().end(), [](double d) { return !(d >= 0.0); })) {
        throw ConfigError("synthesis", "depth must be non-negative");
    }
    if (!(beta >= 0.0)) {
        throw ConfigError("synthesis", "beta must be non-negative");
    }
    for (double c : airlight) {
        if (!(c >= 0.0 && c <= 1.0)) {
            throw ConfigError("synthesis", "airlight components must lie in [0,1]");
        }
    }
    if (!(noise_sigma >= 0.0)) {
        throw ConfigError("synthesis", "sigma must be non-negative");
    }
}

ScalarMap transmission_from_depth(const ScalarMap& depth, double beta)
{
    if (!(beta >= 0.0)) {
        throw ConfigError("synthesis", "beta must be non-negative");
    }
    ScalarMap t(depth.width(), depth.height());
    for (std::size_t i = 0; i < depth.size(); ++i) {
        if (!(depth[i] >= 0.0)) {
            throw ConfigError("synthesis", "depth must be non-negative");
        }
        t[i] = std::exp(-beta * depth[i]);
    }
    return t;
}

Image synthesize_haze(const SceneSpec& scene)
{
    scene.validate();
    const ScalarMap t = transmission_from_depth(scene.depth, scene.beta);
    Image out(scene.radiance.width(), scene.radiance.height());
    auto j = scene.radiance.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        for (int c = 0; c < 3; ++c) {
            dst[3 * i + c] = t[i] * j[3 * i + c] + (1.0 - t[i]) * scene.airlight[c];
        }
    }
    return add_gaussian_noise(out, scene.noise_sigma, scene.noise_seed).clamped();
}

Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0)) {
        throw ConfigError("synthesis", "sigma must be non-negative");
    }
    if (sigma == 0.0) {
        return img;
    }
    Image out = img;
    auto d = out.data();
    for (std::size_t k = 0; k < d.size(); ++k) {
        // Box-Muller on two counter-derived uniforms.
        const double u1 = hash_uniform(seed, k, 0);
        const double u2 = hash_uniform(seed, k, 1);
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        d[k] = std::clamp(d[k] + sigma * z, 0.0, 1.0);
    }
    return out;
}

void SceneDescription::validate() const
{
    const auto fail = [](const std::string& field, const std::string& what) {
        throw ConfigError("scene", "'" + field + "' " + what);
    };
    if (width < 1 || width > 16384) {
        fail("width", "must lie in [1, 16384]");
    }
    if (height < 1 || height > 16384) {
        fail("height", "must lie in [1, 16384]");
    }
    if (!(beta >= 0.0)) {
        fail("beta", "must be non-negative");
    }
    for (double c : airlight) {
        if (!(c >= 0.0 && c <= 1.0)) {
            fail("airlight", "components must lie in [0,1]");
        }
    }
    if (!(noise_sigma >= 0.0 && noise_sigma <= 1.0)) {
        fail("sigma", "must lie in [0,1]");
    }
    if (!(t_near > 0.0 && t_near <= 1.0)) {
        fail("t_near", "must lie in (0,1]");
    }
    if (!(t_far > 0.0 && t_far <= t_near)) {
        fail("t_far", "must lie in (0, t_near]");
    }
    if (!(sky_fraction > 0.0 && sky_fraction < 1.0)) {
        fail("sky_fraction", "must lie in (0,1)");
    }
    if (!(sky_transmission > 0.0 && sky_transmission < 0.05)) {
        fail("sky_transmission", "must lie in (0, 0.05)");
    }
    if (tile < 2) {
        fail("tile", "must be at least 2");
    }
    if (!(depth_scale > 0.0)) {
        fail("depth_scale", "must be positive");
    }
}

SceneDescription parse_scene_description(std::string_view text)
{
    const std::string stage = "scene";
    SceneDescription d;
    for (const KeyValue& kv : parse_key_values(text, stage)) {
        const std::string& k = kv.key;
        if (k == "layout" || k == "depth") {
            if (kv.value == "gradient") {
                d.layout = DepthLayout::gradient;
            } else if (kv.value == "two_plane") {
                d.layout = DepthLayout::two_plane;
            } else if (kv.value == "flat") {
                d.layout = DepthLayout::flat;
            } else {
                throw ConfigError(stage, "'" + k + "' must be gradient, two_plane or flat (got '" + kv.value + "')");
            }
        } else if (k == "width") {
            d.width = static_cast<int>(parse_integer(kv, stage));
        } else if (k == "height") {
            d.height = static_cast<int>(parse_integer(kv, stage));
        } else if (k == "beta") {
            d.beta = parse_real(kv, stage);
        } else if (k == "airlight") {
            d.airlight = parse_triple(kv, stage);
        } else if (k == "sigma") {
            d.noise_sigma = parse_real(kv, stage);
        } else if (k == "seed") {
            d.noise_seed = static_cast<std::uint64_t>(parse_integer(kv, stage));
        } else if (k == "texture_seed") {
            d.texture_seed = static_cast<std::uint64_t>(parse_integer(kv, stage));
        } else if (k == "t_near") {
            d.t_near = parse_real(kv, stage);
        } else if (k == "t_far") {
            d.t_far = parse_real(kv, stage);
        } else if (k == "sky") {
            d.sky = parse_bool(kv, stage);
        } else if (k == "sky_fraction") {
            d.sky_fraction = parse_real(kv, stage);
        } else if (k == "sky_transmission") {
            d.sky_transmission = parse_real(kv, stage);
        } else if (k == "tile") {
            d.tile = static_cast<int>(parse_integer(kv, stage));
        } else if (k == "depth_file") {
            d.depth_file = kv.value;
        } else if (k == "depth_scale") {
            d.depth_scale = parse_real(kv, stage);
        } else if (k == "radiance_file") {
            d.radiance_file = kv.value;
        } else {
            throw ConfigError(stage, "line " + std::to_string(kv.line) + ": unknown key '" + k + "'");
        }
    }
    d.validate();
    return d;
}

std::string serialize_scene_description(const SceneDescription& d)
{
    std::ostringstream out;
    const char* layout = d.layout == DepthLayout::gradient ? "gradient"
                         : d.layout == DepthLayout::two_plane ? "two_plane"
                                                               : "flat";
    out << "layout: " << layout << '\n'
        << "width: " << d.width << '\n'
        << "height: " << d.height << '\n'
        << "beta: " << format_real(d.beta) << '\n'
        << "airlight: " << format_real(d.airlight[0]) << ' ' << format_real(d.airlight[1]) << ' '
        << format_real(d.airlight[2]) << '\n'
        << "sigma: " << format_real(d.noise_sigma) << '\n'
        << "seed: " << d.noise_seed << '\n'
        << "texture_seed: " << d.texture_seed << '\n'
        << "t_near: " << format_real(d.t_near) << '\n'
        << "t_far: " << format_real(d.t_far) << '\n'
        << "sky: " << (d.sky ? "true" : "false") << '\n'
        << "sky_fraction: " << format_real(d.sky_fraction) << '\n'
        << "sky_transmission: " << format_real(d.sky_transmission) << '\n'
        << "tile: " << d.tile << '\n';
    if (!d.depth_file.empty()) {
        out << "depth_file: " << d.depth_file << '\n' << "depth_scale: " << format_real(d.depth_scale) << '\n';
    }
    if (!d.radiance_file.empty()) {
        out << "radiance_file: " << d.radiance_file << '\n';
    }
    return out.str();
}

namespace {

int sky_rows(const SceneDescription& d)
{
    return d.sky ? std::max(1, static_cast<int>(std::lround(d.sky_fraction * d.height))) : 0;
}

// Fully saturated hue with the weakest channel pushed near zero.
Rgb tile_colour(std::uint64_t seed, int tx, int ty)
{
    const double hue = hash_uniform(seed, static_cast<std::uint64_t>(tx) * 7919 + ty, 11) * 6.0;
    const double sat_floor = 0.02;
    const int sector = static_cast<int>(hue) % 6;
    const double f = hue - std::floor(hue);
    const double hi = 0.95;
    const double mid_up = sat_floor + (hi - sat_floor) * f;
    const double mid_down = hi - (hi - sat_floor) * f;
    switch (sector) {
    case 0:
        return {hi, mid_up, sat_floor};
    case 1:
        return {mid_down, hi, sat_floor};
    case 2:
        return {sat_floor, hi, mid_up};
    case 3:
        return {sat_floor, mid_down, hi};
    case 4:
        return {mid_up, sat_floor, hi};
    default:
        return {hi, sat_floor, mid_down};
    }
}

}  // namespace

Image generate_radiance(const SceneDescription& d)
{
    Image img(d.width, d.height);
    const int sky = sky_rows(d);
    const double phase_x = hash_uniform(d.texture_seed, 1, 2) * 2.0 * std::numbers::pi;
    const double phase_y = hash_uniform(d.texture_seed, 3, 4) * 2.0 * std::numbers::pi;
    for (int y = 0; y < d.height; ++y) {
        for (int x = 0; x < d.width; ++x) {
            if (y < sky) {
                // Smooth bright sky, close to but not equal to the airlight.
                const double v = static_cast<double>(y) / std::max(1, sky - 1);
                img.set(x, y, {0.70 + 0.05 * v, 0.78 + 0.04 * v, 0.90 - 0.02 * v});
                continue;
            }
            const Rgb base = tile_colour(d.texture_seed, x / d.tile, (y - sky) / d.tile);
            const double shade = 0.6 + 0.25 * std::sin(2.0 * std::numbers::pi * x / (1.7 * d.tile) + phase_x) +
                                 0.15 * std::cos(2.0 * std::numbers::pi * y / (2.3 * d.tile) + phase_y);
            img.set(x, y, std::clamp(shade, 0.05, 1.0) * base);
        }
    }
    return img;
}

ScalarMap generate_depth(const SceneDescription& d)
{
    ScalarMap depth(d.width, d.height);
    if (d.layout == DepthLayout::flat || d.beta == 0.0) {
        const double t = d.layout == DepthLayout::flat ? d.t_near : 1.0;
        const double v = d.beta > 0.0 ? -std::log(t) / d.beta : 0.0;
        std::fill(depth.values().begin(), depth.values().end(), v);
        return depth;
    }
    const int sky = sky_rows(d);
    const double d_near = -std::log(d.t_near) / d.beta;
    const double d_far = -std::log(d.t_far) / d.beta;
    const double d_sky = -std::log(d.sky_transmission) / d.beta;
    const int rows = std::max(1, d.height - sky);
    for (int y = 0; y < d.height; ++y) {
        for (int x = 0; x < d.width; ++x) {
            double v = 0.0;
            if (y < sky) {
                v = d_sky;
            } else if (d.layout == DepthLayout::gradient) {
                // Far at the top of the ground region, near at the bottom.
                const double s = rows > 1 ? static_cast<double>(y - sky) / (rows - 1) : 0.0;
                v = d_far + (d_near - d_far) * s;
            } else {
                v = x < d.width / 2 ? d_far : d_near;
            }
            depth.at(x, y) = v;
        }
    }
    return depth;
}

SceneSpec build_scene(const SceneDescription& d)
{
    d.validate();
    SceneSpec s;
    s.radiance = generate_radiance(d);
    s.depth = generate_depth(d);
    s.beta = d.beta;
    s.airlight = d.airlight;
    s.noise_sigma = d.noise_sigma;
    s.noise_seed = d.noise_seed;
    return s;
}

std::vector<std::uint8_t> sky_mask(const ScalarMap& t_true, double threshold)
{
    std::vector<std::uint8_t> m(t_true.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = t_true[i] < threshold ? 1 : 0;
    }
    return m;
}

}  // namespace dehaze
