#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dehaze/image.hpp"

namespace dehaze {

constexpr double kPsnrCap = 100.0;

/// Mean over pixels and channels of the squared difference.
double mse(const Image& a, const Image& b);

/// 10 log10(peak^2 / mse), capped at 100 dB. Images are compared on the [0,1]
/// scale; peak = 255 reproduces 8-bit style magnitudes.
double psnr_from_mse(double mse_value, double peak = 1.0);
double psnr(const Image& a, const Image& b, double peak = 1.0);

/// Mean local SSIM on luma over valid 11x11 Gaussian windows (sigma 1.5),
/// C1 = 0.01^2, C2 = 0.03^2. Needs both dimensions >= 11.
double ssim(const Image& a, const Image& b);

/// Per-pixel weights for wsnr: gradient magnitude of the reference luma from
/// central differences (one-sided at the borders), normalised to mean 1. A
/// reference without any gradient gets uniform weights.
ScalarMap wsnr_weights(const Image& reference);

/// PSNR of the weighted mean squared error, weights from `reference`.
double wsnr(const Image& result, const Image& reference, double peak = 1.0);

/// Mean |t_est - t_true| over pixels with mask set. Throws on an empty mask.
double l1_transmission_error(const ScalarMap& t_est, const ScalarMap& t_true, std::span<const std::uint8_t> mask);

struct QualityReport {
    double mse = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
    double wsnr = 0.0;
    std::optional<double> l1_transmission;
    /// Fraction of pixels that entered the transmission error (1 without a mask).
    double mask_coverage = 1.0;
};

struct EvaluationOptions {
    double peak = 1.0;
    bool mask_sky = false;
    double sky_threshold = 0.05;
};

QualityReport evaluate_pair(const Image& result, const Image& reference, const ScalarMap* t_est,
                            const ScalarMap* t_true, const EvaluationOptions& opts = {});

/// key: value lines; l1_transmission is omitted when absent.
std::string serialize_report(const QualityReport& r);
QualityReport parse_report(std::string_view text);

/// Field-wise arithmetic mean. l1_transmission is averaged over the reports that have it.
QualityReport mean_report(std::span<const QualityReport> reports);

}  // namespace dehaze
