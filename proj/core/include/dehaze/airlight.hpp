#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dehaze/color_line.hpp"
#include "dehaze/image.hpp"

namespace dehaze {

/// Global airlight direction plus the per-pixel magnitude field a(x).
struct AirlightModel {
    Rgb direction{};
    ScalarMap magnitudes;           // a(x), meaningful where `valid` is set
    std::vector<std::uint8_t> valid;  // 1 where a(x) has been estimated
    ScalarMap sigma;                // per-pixel copy of the producing patch's sigma_a
};

/// Unit direction minimising sum_i w_i (N_i . A)^2: the eigenvector of
/// sum_i w_i N_i N_i^T with the smallest eigenvalue, signed non-negative.
/// Normals are accumulated in a canonical (sorted) order, so any permutation
/// of the input gives a bit-identical result. Empty weights mean uniform.
/// Throws NumericError("ill-conditioned airlight") for fewer than 3 normals or
/// when the two smallest eigenvalues are within 1e-9 (relative to the trace).
Rgb estimate_airlight_direction(std::span<const Rgb> normals, std::span<const double> weights = {});

/// Indices (ascending) of the largest weighted set of normals that are within
/// `tolerance_deg` of perpendicular to a common non-negative direction. Every
/// pair cross product is tried, so the result does not depend on input order up
/// to exact score ties. Empty when no pair spans a non-negative candidate.
std::vector<int> consensus_normals(std::span<const Rgb> normals, std::span<const double> weights = {},
                                   double tolerance_deg = 2.0);

struct AirlightMagnitude {
    double rho = 0.0;
    double s = 0.0;
    double residual = 0.0;
};

/// Closest approach between the colour line p0 + rho*dir and the airlight axis
/// s*A (2x2 normal equations). Throws NumericError("parallel lines") when
/// |dir . A| >= 1 - 1e-9.
AirlightMagnitude estimate_airlight_magnitude(const ColorLine& line, const Rgb& airlight_dir);

/// Distance between the line and the airlight axis; also defined for parallel lines.
double line_axis_distance(const ColorLine& line, const Rgb& airlight_dir);

struct MagnitudeValidation {
    double min_angle_deg = 15.0;
    double max_residual = 0.05;
    double min_magnitude = 0.0;
    double max_magnitude = 1.0;
    double min_shading_spread = 0.02;
};

enum class AirlightFailure : std::uint8_t {
    none,
    intersection_angle,
    close_intersection,
    valid_range,
    shading_variability,
};

std::string_view to_string(AirlightFailure f);

/// Checks in order: angle between dir and the airlight axis, closest-approach
/// residual, s within [min_magnitude, max_magnitude], spread (max - min) of the
/// inlier projections. Returns the first failure.
AirlightFailure validate_airlight_magnitude(const ColorLine& line, const Rgb& airlight_dir,
                                            const AirlightMagnitude& m, std::span<const double> projections,
                                            const MagnitudeValidation& v = {});

struct RefinementResult {
    Rgb direction{};
    /// Sum of line-to-axis residuals of every accepted iterate, starting with the
    /// initial direction. Non-increasing by construction.
    std::vector<double> residual_trace;
};

/// Iteratively reweighted re-estimation of the direction that minimises the sum
/// of line-to-axis residuals. A step that does not lower the sum is halved a few
/// times; if it still does not, the loop ends and the candidate is discarded.
RefinementResult refine_airlight_direction(std::span<const ColorLine> lines, const Rgb& initial,
                                           int max_iterations = 8, double eps = 1e-3);

}  // namespace dehaze
