#include "dehaze/recovery.hpp"

#include <algorithm>
#include <cmath>

namespace dehaze {

void RecoveryParams::validate() const
{
    if (!(t0 >= 0.05 && t0 <= 0.2)) {
        throw ConfigError("recovery", "t0 must lie in [0.05, 0.2]");
    }
    if (!(gamma >= 0.3 && gamma <= 3.0)) {
        throw ConfigError("recovery", "gamma must lie in [0.3, 3]");
    }
}

Image recover_radiance(const Image& img, const ScalarMap& t, const Rgb& airlight, const RecoveryParams& params)
{
    if (!t.same_shape(img)) {
        throw ConfigError("recovery", "transmission map does not match the image");
    }
    Image out(img.width(), img.height());
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double div = std::max(t[i], params.t0);
        for (int c = 0; c < 3; ++c) {
            dst[3 * i + c] = std::clamp((src[3 * i + c] - airlight[c]) / div + airlight[c], 0.0, 1.0);
        }
    }
    return out;
}

Image direct_transmission_component(const Image& img, const ScalarMap& a, const Rgb& airlight_dir)
{
    if (!a.same_shape(img)) {
        throw ConfigError("recovery", "airlight field does not match the image");
    }
    Image out(img.width(), img.height());
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        for (int c = 0; c < 3; ++c) {
            dst[3 * i + c] = std::max(src[3 * i + c] - a[i] * airlight_dir[c], 0.0);
        }
    }
    return out;
}

ContrastResult contrast_restore(const Image& jt, const ScalarMap& a, const Rgb& airlight_dir, double reference_luma)
{
    if (!a.same_shape(jt)) {
        throw ConfigError("recovery", "airlight field does not match the image");
    }
    if (!(reference_luma > 0.0)) {
        throw ConfigError("recovery", "reference luma must be positive");
    }
    constexpr double kMinDenominator = 1e-6;
    ContrastResult res{Image(jt.width(), jt.height()), 0};
    const double dir_luma = luma(airlight_dir);
    auto src = jt.data();
    auto dst = res.image.data();
    for (std::size_t i = 0; i < jt.pixel_count(); ++i) {
        double den = 1.0 - a[i] * dir_luma / reference_luma;
        if (den < kMinDenominator) {
            den = kMinDenominator;
            ++res.saturated;
        }
        for (int c = 0; c < 3; ++c) {
            dst[3 * i + c] = std::clamp(src[3 * i + c] / den, 0.0, 1.0);
        }
    }
    return res;
}

Image gamma_correct(const Image& img, double gamma)
{
    if (!(gamma > 0.0)) {
        throw ConfigError("recovery", "gamma must be positive");
    }
    Image out = img.clamped();
    if (gamma == 1.0) {
        return out;
    }
    const double e = 1.0 / gamma;
    for (double& v : out.data()) {
        v = std::pow(v, e);
    }
    return out;
}

}  // namespace dehaze
