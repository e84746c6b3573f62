#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dehaze/airlight.hpp"
#include "dehaze/color_line.hpp"
#include "dehaze/dark_channel.hpp"
#include "dehaze/recovery.hpp"
#include "dehaze/regularization.hpp"

namespace dehaze {

/// Every tunable of the dehaze pipeline. Key names in the config file match
/// the member names.
struct PipelineConfig {
    // Dark channel and anchors.
    int patch_size = 15;
    double airlight_floor = 1.0 / 255.0;
    /// Local-max window for anchor selection; independent of patch_size.
    int anchor_window = 3;
    double anchor_top_fraction = 1.0;
    /// Box blur radius applied to the copy used for transmission estimation.
    int prefilter_radius = 0;

    // Colour lines: starting patch, stride and the largest patch of the growth ladder.
    int line_patch_size = 7;
    int line_stride = 7;
    int max_line_patch_size = 31;
    double inlier_sigma = 0.02;
    double min_inlier_fraction = 0.4;
    double inlier_prior = 0.5;
    int hypotheses = 64;
    bool spatial_features = false;
    double spatial_sigma = 0.05;
    double slope_tolerance = 0.02;
    int histogram_bins = 10;
    /// Lines closer than this to the RGB origin carry no airlight information.
    double min_line_offset = 0.02;

    // Airlight.
    bool weight_normals = true;
    /// Normals further than this from perpendicular to the consensus direction are dropped.
    double direction_tolerance_deg = 2.0;
    double min_angle_deg = 15.0;
    double max_residual = 0.05;
    double min_shading_spread = 0.02;
    int refine_iterations = 8;

    // Feature balance for nearest-neighbour propagation and for the classifier's spatial terms.
    double lambda = 0.1;
    double lambda_reg = 0.1;

    // Airlight interpolation.
    double alpha = 0.1;
    double beta = 0.001;
    double epsilon = 1e-4;
    double solver_tol = 1e-6;
    int solver_max_iter = 0;

    // Recovery.
    double t0 = 0.1;
    double gamma = 1.5;
    RecoveryMode mode = RecoveryMode::airlight_subtraction;
    /// Smallest transmission the airlight path may imply (caps a(x) below the full airlight).
    double min_airlight_transmission = 0.05;

    int threads = 1;
    std::uint64_t seed = 0;

    /// Throws ConfigError naming the first out-of-range field.
    void validate() const;

    DcpParams dcp() const;
    ClassifierParams classifier() const;
    MagnitudeValidation magnitude_validation() const;
    InterpolationParams interpolation() const;
    RecoveryParams recovery() const;
};

/// Applies `key = value` lines on top of `base`, rejecting unknown keys, then validates.
PipelineConfig load_config(std::string_view text, PipelineConfig base = {});

/// Sets one field from its textual value (no validation).
void set_config_field(PipelineConfig& cfg, const std::string& key, const std::string& value);

/// All fields as `key: value` lines in a fixed order. Loading the result
/// reproduces the configuration exactly.
std::string serialize_config(const PipelineConfig& cfg);

std::vector<std::string> config_keys();

std::string_view to_string(RecoveryMode m);
RecoveryMode parse_recovery_mode(std::string_view text);

}  // namespace dehaze
