#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dehaze/image.hpp"

namespace dehaze {

/// 1-D line of colours P = p0 + rho * dir fitted to a patch, with the unit normal
/// of the plane it spans together with the RGB origin.
struct ColorLine {
    Rgb p0{};
    Rgb dir{};
    Rgb normal{};
    std::vector<int> inliers;  // indices into the patch pixels, row-major within bounds
    int support = 0;
    /// Distance of the line from the RGB origin. Near zero the plane (and the
    /// normal) is not determined by the data.
    double origin_distance = 0.0;
};

struct ClassifierParams {
    double inlier_sigma = 0.02;
    double min_inlier_fraction = 0.4;
    /// Largest half size the growth ladder may reach (15 -> 31x31 patches).
    int max_patch_growth = 15;
    double inlier_prior = 0.5;
    int hypotheses = 64;
    /// Use the spatial terms of the feature vector as two extra likelihood
    /// factors (distance to the patch centroid) instead of colour residuals only.
    bool spatial_features = false;
    double spatial_sigma = 0.05;
    double feature_lambda = 0.1;
    /// Validation knobs, see LineValidation.
    double slope_tolerance = 0.02;
    int histogram_bins = 10;

    void validate() const;
};

/// Generic naive Bayes posterior: p(C_k | x) proportional to p(C_k) * prod_i p(x_i | C_k).
/// likelihoods[k][i] holds p(x_i | C_k). Priors need not be normalised.
std::vector<double> naive_bayes_posterior(std::span<const double> priors,
                                          const std::vector<std::vector<double>>& likelihoods);

struct CandidateLine {
    Rgb p0{};
    Rgb dir{};
};

struct ClassPosterior {
    double inlier = 0.0;
    double outlier = 0.0;
};

/// Two-class posterior per pixel. Inlier features are the three components of
/// the residual orthogonal to the line, each a zero-mean Gaussian of width
/// inlier_sigma; outliers are uniform over the RGB cube.
std::vector<ClassPosterior> classify_patch_pixels(std::span<const FeatureVector> pixels,
                                                  const CandidateLine& line, const ClassifierParams& params);

enum class LineFailure : std::uint8_t {
    none,
    patch_too_small,
    degenerate_patch,
    low_support,
    positive_slope,
    unimodality,
};

std::string_view to_string(LineFailure f);

struct LineFit {
    std::optional<ColorLine> line;
    LineFailure failure = LineFailure::none;
    PatchRef patch;  // the patch the result refers to (after growth)

    bool ok() const { return line.has_value(); }
};

/// Hypothesise-and-classify fit: `params.hypotheses` pixel pairs drawn from
/// rng_seed, scored by total inlier posterior, best one refined by a principal
/// axis fit over its inliers.
LineFit fit_color_line(const PatchRef& patch, const Image& img, const ClassifierParams& params,
                       std::uint64_t rng_seed);

struct LineValidation {
    double min_inlier_fraction = 0.4;
    /// Direction components within this distance of zero count as either sign.
    double slope_tolerance = 0.02;
    int histogram_bins = 10;
};

/// Projections of the line's inliers onto its direction.
std::vector<double> inlier_projections(const ColorLine& line, const PatchRef& patch, const Image& img);

/// Checks in order: support, common sign of dir (flipping it to non-negative,
/// in place), unimodality of the inlier projections. Returns the first failure.
LineFailure validate_color_line(ColorLine& line, int patch_pixel_count, std::span<const double> projections,
                                const LineValidation& v = {});

/// Histogram unimodality: the values are bimodal when two bins holding at least
/// two values each are separated by a run of two or more bins that all hold at
/// most half of the smaller of the two. Single-bin dips are quantisation noise.
bool is_unimodal(std::span<const double> values, int bins);

/// Seed for a patch fit, a pure function of the patch centre and size.
std::uint64_t patch_seed(const PatchRef& patch, std::uint64_t base_seed);

/// Fit and validate one patch, nothing else.
LineFit fit_and_validate(const PatchRef& patch, const Image& img, const ClassifierParams& params,
                         std::uint64_t base_seed);

/// Growth ladder: doubles the half size (3 -> 7 -> 15, clipped to
/// params.max_patch_growth and the image) and refits until a line validates.
/// Starts from the first size strictly larger than patch.half_size.
LineFit grow_patch_and_refit(const PatchRef& patch, const Image& img, const ClassifierParams& params,
                             std::uint64_t base_seed = 0);

}  // namespace dehaze
