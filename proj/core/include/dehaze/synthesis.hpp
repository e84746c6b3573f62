#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "dehaze/image.hpp"

namespace dehaze {

struct SceneSpec {
    Image radiance;
    ScalarMap depth;
    double beta = 1.0;
    Rgb airlight{0.8, 0.8, 0.8};
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// t = exp(-beta * d).
ScalarMap transmission_from_depth(const ScalarMap& depth, double beta);

/// I = t J + (1 - t) A, then Gaussian noise, clamped to [0,1].
Image synthesize_haze(const SceneSpec& scene);

/// Per-channel zero-mean Gaussian noise. Each sample is a pure function of
/// (seed, pixel, channel), so the output does not depend on evaluation order.
Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed);

enum class DepthLayout : std::uint8_t { gradient, two_plane, flat };

/// Parameters of the built-in scene generator.
struct SceneDescription {
    DepthLayout layout = DepthLayout::gradient;
    int width = 128;
    int height = 128;
    double beta = 1.0;
    Rgb airlight{0.8, 0.8, 0.8};
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 1;
    std::uint64_t texture_seed = 1;
    /// Transmission range of the non-sky part. Depths are derived through beta.
    double t_near = 0.9;
    double t_far = 0.2;
    /// Top rows given t = sky_transmission and a near-airlight radiance.
    bool sky = false;
    double sky_fraction = 0.25;
    double sky_transmission = 0.02;
    int tile = 16;
    /// Optional external inputs (16-bit depth PNG scaled by depth_scale, colour radiance).
    std::string depth_file;
    double depth_scale = 1.0;
    std::string radiance_file;

    void validate() const;
};

/// Reads a scene description from key-value text. Unknown keys and malformed
/// values throw ConfigError naming the field.
SceneDescription parse_scene_description(std::string_view text);
std::string serialize_scene_description(const SceneDescription& d);

/// Textured radiance: tiles of saturated colour with a near-zero channel,
/// modulated by smooth shading; plus a bright sky band when requested.
Image generate_radiance(const SceneDescription& d);
ScalarMap generate_depth(const SceneDescription& d);

/// Radiance and depth from the generator, ready for synthesize_haze.
SceneSpec build_scene(const SceneDescription& d);

/// Sky mask for evaluation: t_true < 0.05.
std::vector<std::uint8_t> sky_mask(const ScalarMap& t_true, double threshold = 0.05);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dehaze
