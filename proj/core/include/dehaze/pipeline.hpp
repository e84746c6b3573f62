#pragma once

#include <map>
#include <string>
#include <vector>

#include "dehaze/airlight.hpp"
#include "dehaze/config.hpp"
#include "dehaze/dark_channel.hpp"
#include "dehaze/image.hpp"

namespace dehaze {

struct AirlightReport {
    Rgb atmospheric_light{};  // brightest-haze estimate from the dark channel
    Rgb direction{};
    /// "color_lines", or "atmospheric_light" when too few lines carried a normal.
    std::string direction_source;
    double magnitude = 0.0;  // |A| along the direction
    int anchors = 0;
    int patches = 0;
    int lines_accepted = 0;
    int lines_rejected = 0;
    int consensus_lines = 0;  // lines whose normals fixed the direction
    int magnitudes_accepted = 0;
    int magnitudes_rejected = 0;
    std::map<std::string, int> rejections;
    double solver_residual = 0.0;
    int solver_iterations = 0;
    std::size_t saturated_pixels = 0;
    std::vector<double> residual_trace;
};

struct PipelineResult {
    ScalarMap dark;
    ScalarMap t_raw;
    std::vector<Anchor> anchors;
    AirlightModel airlight;   // sparse a(x) as a fraction of the airlight magnitude
    ScalarMap airlight_field; // interpolated fraction in [0,1]
    /// Nearest-neighbour regularised in trans mode; 1 - capped airlight fraction in airlight mode.
    ScalarMap transmission;
    Image radiance;           // before gamma
    Image output;
    AirlightReport report;
};

/// Runs every stage in order on a normalised image. Throws ConfigError when the
/// image is smaller than the configured patches and NumericError when the
/// airlight or the interpolation cannot be determined.
PipelineResult run_pipeline(const Image& hazy, const PipelineConfig& cfg);

std::string serialize_airlight_report(const AirlightReport& r);

}  // namespace dehaze
