#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dehaze/image.hpp"

namespace dehaze {

enum class RecoveryMode : std::uint8_t { transmission_recovery, airlight_subtraction };

struct RecoveryParams {
    double t0 = 0.1;
    double gamma = 1.5;
    RecoveryMode mode = RecoveryMode::airlight_subtraction;

    /// t0 in [0.05, 0.2], gamma in [0.3, 3].
    void validate() const;
};

/// J = (I - A) / max(t, t0) + A per channel, clamped to [0,1].
Image recover_radiance(const Image& img, const ScalarMap& t, const Rgb& airlight, const RecoveryParams& params);

/// Jt = I - a * A_dir, negatives clamped to 0.
Image direct_transmission_component(const Image& img, const ScalarMap& a, const Rgb& airlight_dir);

struct ContrastResult {
    Image image;
    /// Pixels whose denominator fell below 1e-6 and was clamped.
    std::size_t saturated = 0;
};

/// R = Jt / (1 - Y(a * A_dir) / reference_luma), clamped to [0,1]. With the
/// default reference of 1 this is the plain luma-normalised boost; passing
/// Y(A) makes the divisor equal the transmission when a * A_dir is the true
/// airlight contribution.
ContrastResult contrast_restore(const Image& jt, const ScalarMap& a, const Rgb& airlight_dir,
                                double reference_luma = 1.0);

/// Clamps to [0,1] then raises each channel to 1/gamma.
Image gamma_correct(const Image& img, double gamma);

}  // namespace dehaze
