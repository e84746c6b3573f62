#pragma once

#include <vector>

#include "dehaze/image.hpp"

namespace dehaze {

struct DcpParams {
    int patch_size = 15;
    double airlight_floor = 1.0 / 255.0;

    /// Throws ConfigError unless patch_size is odd and >= 3 and airlight_floor is in (0, 0.1].
    void validate() const;
};

/// Sliding-window minimum over a (window x window) square, clipped at the borders.
/// Separable: one monotone-deque pass over rows, one over columns.
ScalarMap min_filter(const ScalarMap& in, int window, int threads = 1);
ScalarMap max_filter(const ScalarMap& in, int window, int threads = 1);

/// Per-pixel minimum over the three channels.
ScalarMap channel_min(const Image& img);

/// min over channels and over the patch around each pixel.
ScalarMap dark_channel(const Image& img, int patch_size, int threads = 1);

/// t(x) = 1 - min_c min_{y in patch} I^c(y) / A^c, clamped to [0,1].
/// Airlight components are floored at params.airlight_floor before dividing.
ScalarMap estimate_transmission_dcp(const Image& img, const Rgb& airlight, const DcpParams& params, int threads = 1);

/// Same ratio without the spatial minimum: a lower bound on t at every pixel,
/// tight where the radiance has a zero channel. The DCP estimate is its max filter.
ScalarMap pixel_transmission_bound(const Image& img, const Rgb& airlight, double airlight_floor = 1.0 / 255.0);

/// Atmospheric light from the brightest `fraction` of dark-channel pixels: among
/// them the pixel of largest intensity sum is returned.
Rgb estimate_atmospheric_light(const Image& img, const ScalarMap& dark, double fraction = 0.001);

struct Anchor {
    int x = 0;
    int y = 0;
    double t = 0.0;
    bool operator==(const Anchor&) const = default;
};

/// Pixels that are strict maxima of `t_raw` inside their (window x window)
/// neighbourhood, keeping the `top_fraction` largest (at least one). Returned in
/// row-major order. A constant map yields the single centre pixel; a map whose
/// maxima are all plateaus yields its first global maximum.
std::vector<Anchor> max_filter_anchor_points(const ScalarMap& t_raw, int window, double top_fraction);

}  // namespace dehaze
