#include "dehaze/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include "dehaze/keyvalue.hpp"

namespace dehaze {

namespace {

const std::string kStage = "config";

struct Field {
    const char* name;
    std::function<void(PipelineConfig&, const KeyValue&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

template <typename T>
Field real_field(const char* name, T PipelineConfig::*member)
{
    return {name, [member](PipelineConfig& c, const KeyValue& kv) { c.*member = parse_real(kv, kStage); },
            [member](const PipelineConfig& c) { return format_real(c.*member); }};
}

Field int_field(const char* name, int PipelineConfig::*member)
{
    return {name,
            [member](PipelineConfig& c, const KeyValue& kv) {
                const long long v = parse_integer(kv, kStage);
                if (v < -1000000000LL || v > 1000000000LL) {
                    throw ConfigError(kStage, "'" + kv.key + "' is out of range");
                }
                c.*member = static_cast<int>(v);
            },
            [member](const PipelineConfig& c) { return std::to_string(c.*member); }};
}

Field bool_field(const char* name, bool PipelineConfig::*member)
{
    return {name, [member](PipelineConfig& c, const KeyValue& kv) { c.*member = parse_bool(kv, kStage); },
            [member](const PipelineConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        int_field("patch_size", &PipelineConfig::patch_size),
        real_field("airlight_floor", &PipelineConfig::airlight_floor),
        int_field("anchor_window", &PipelineConfig::anchor_window),
        real_field("anchor_top_fraction", &PipelineConfig::anchor_top_fraction),
        int_field("prefilter_radius", &PipelineConfig::prefilter_radius),
        int_field("line_patch_size", &PipelineConfig::line_patch_size),
        int_field("line_stride", &PipelineConfig::line_stride),
        int_field("max_line_patch_size", &PipelineConfig::max_line_patch_size),
        real_field("inlier_sigma", &PipelineConfig::inlier_sigma),
        real_field("min_inlier_fraction", &PipelineConfig::min_inlier_fraction),
        real_field("inlier_prior", &PipelineConfig::inlier_prior),
        int_field("hypotheses", &PipelineConfig::hypotheses),
        bool_field("spatial_features", &PipelineConfig::spatial_features),
        real_field("spatial_sigma", &PipelineConfig::spatial_sigma),
        real_field("slope_tolerance", &PipelineConfig::slope_tolerance),
        int_field("histogram_bins", &PipelineConfig::histogram_bins),
        real_field("min_line_offset", &PipelineConfig::min_line_offset),
        bool_field("weight_normals", &PipelineConfig::weight_normals),
        real_field("direction_tolerance_deg", &PipelineConfig::direction_tolerance_deg),
        real_field("min_angle_deg", &PipelineConfig::min_angle_deg),
        real_field("max_residual", &PipelineConfig::max_residual),
        real_field("min_shading_spread", &PipelineConfig::min_shading_spread),
        int_field("refine_iterations", &PipelineConfig::refine_iterations),
        real_field("lambda", &PipelineConfig::lambda),
        real_field("lambda_reg", &PipelineConfig::lambda_reg),
        real_field("alpha", &PipelineConfig::alpha),
        real_field("beta", &PipelineConfig::beta),
        real_field("epsilon", &PipelineConfig::epsilon),
        real_field("solver_tol", &PipelineConfig::solver_tol),
        int_field("solver_max_iter", &PipelineConfig::solver_max_iter),
        real_field("t0", &PipelineConfig::t0),
        real_field("gamma", &PipelineConfig::gamma),
        {"mode", [](PipelineConfig& c, const KeyValue& kv) { c.mode = parse_recovery_mode(kv.value); },
         [](const PipelineConfig& c) { return std::string(to_string(c.mode)); }},
        real_field("min_airlight_transmission", &PipelineConfig::min_airlight_transmission),
        int_field("threads", &PipelineConfig::threads),
        {"seed",
         [](PipelineConfig& c, const KeyValue& kv) {
             std::uint64_t v = 0;
             const char* end = kv.value.data() + kv.value.size();
             const auto [ptr, ec] = std::from_chars(kv.value.data(), end, v);
             if (ec != std::errc{} || ptr != end || kv.value.empty()) {
                 throw ConfigError(kStage, "'seed' expects an unsigned 64-bit integer (got '" + kv.value + "')");
             }
             c.seed = v;
         },
         [](const PipelineConfig& c) { return std::to_string(c.seed); }},
    };
    return table;
}

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok) {
        throw ConfigError(kStage, "'" + field + "' " + what);
    }
}

}  // namespace

std::string_view to_string(RecoveryMode m)
{
    return m == RecoveryMode::transmission_recovery ? "trans" : "airlight";
}

RecoveryMode parse_recovery_mode(std::string_view text)
{
    if (text == "trans" || text == "transmission_recovery") {
        return RecoveryMode::transmission_recovery;
    }
    if (text == "airlight" || text == "airlight_subtraction") {
        return RecoveryMode::airlight_subtraction;
    }
    throw ConfigError(kStage, "'mode' must be trans or airlight (got '" + std::string(text) + "')");
}

void PipelineConfig::validate() const
{
    const auto odd_at_least_3 = [](int v) { return v >= 3 && v % 2 == 1; };
    require(odd_at_least_3(patch_size), "patch_size", "must be odd and at least 3");
    require(airlight_floor > 0.0 && airlight_floor <= 0.1, "airlight_floor", "must lie in (0, 0.1]");
    require(anchor_window >= 1 && anchor_window % 2 == 1, "anchor_window", "must be a positive odd integer");
    require(anchor_top_fraction > 0.0 && anchor_top_fraction <= 1.0, "anchor_top_fraction", "must lie in (0, 1]");
    require(prefilter_radius >= 0 && prefilter_radius <= 8, "prefilter_radius", "must lie in [0, 8]");
    require(odd_at_least_3(line_patch_size), "line_patch_size", "must be odd and at least 3");
    require(line_stride >= 1 && line_stride <= line_patch_size, "line_stride", "must lie in [1, line_patch_size]");
    require(odd_at_least_3(max_line_patch_size) && max_line_patch_size >= line_patch_size, "max_line_patch_size",
            "must be odd and at least line_patch_size");
    require(inlier_sigma > 0.0 && inlier_sigma <= 1.0, "inlier_sigma", "must lie in (0, 1]");
    require(min_inlier_fraction > 0.2 && min_inlier_fraction < 0.9, "min_inlier_fraction", "must lie in (0.2, 0.9)");
    require(inlier_prior > 0.0 && inlier_prior < 1.0, "inlier_prior", "must lie in (0, 1)");
    require(hypotheses >= 1 && hypotheses <= 100000, "hypotheses", "must lie in [1, 100000]");
    require(spatial_sigma > 0.0, "spatial_sigma", "must be positive");
    require(slope_tolerance >= 0.0 && slope_tolerance < 0.5, "slope_tolerance", "must lie in [0, 0.5)");
    require(histogram_bins >= 3 && histogram_bins <= 1000, "histogram_bins", "must lie in [3, 1000]");
    require(min_line_offset >= 0.0 && min_line_offset < 1.0, "min_line_offset", "must lie in [0, 1)");
    require(direction_tolerance_deg > 0.0 && direction_tolerance_deg <= 45.0, "direction_tolerance_deg",
            "must lie in (0, 45]");
    require(min_angle_deg >= 0.0 && min_angle_deg < 90.0, "min_angle_deg", "must lie in [0, 90)");
    require(max_residual > 0.0, "max_residual", "must be positive");
    require(min_shading_spread >= 0.0, "min_shading_spread", "must be non-negative");
    require(refine_iterations >= 0 && refine_iterations <= 1000, "refine_iterations", "must lie in [0, 1000]");
    require(lambda >= 0.0, "lambda", "must be non-negative");
    require(lambda_reg >= 0.0, "lambda_reg", "must be non-negative");
    require(alpha >= 0.0, "alpha", "must be non-negative");
    require(beta >= 0.0, "beta", "must be non-negative");
    require(epsilon > 0.0 && epsilon <= 1.0, "epsilon", "must lie in (0, 1]");
    require(solver_tol > 0.0 && solver_tol < 1.0, "solver_tol", "must lie in (0, 1)");
    require(solver_max_iter >= 0, "solver_max_iter", "must be non-negative (0 selects max(n, 64))");
    require(t0 >= 0.05 && t0 <= 0.2, "t0", "must lie in [0.05, 0.2]");
    require(gamma >= 0.3 && gamma <= 3.0, "gamma", "must lie in [0.3, 3]");
    require(min_airlight_transmission > 0.0 && min_airlight_transmission <= 0.2, "min_airlight_transmission",
            "must lie in (0, 0.2]");
    require(threads >= 1 && threads <= 256, "threads", "must lie in [1, 256]");
}

DcpParams PipelineConfig::dcp() const { return {patch_size, airlight_floor}; }

ClassifierParams PipelineConfig::classifier() const
{
    ClassifierParams p;
    p.inlier_sigma = inlier_sigma;
    p.min_inlier_fraction = min_inlier_fraction;
    p.max_patch_growth = max_line_patch_size / 2;
    p.inlier_prior = inlier_prior;
    p.hypotheses = hypotheses;
    p.spatial_features = spatial_features;
    p.spatial_sigma = spatial_sigma;
    p.feature_lambda = lambda_reg;
    p.slope_tolerance = slope_tolerance;
    p.histogram_bins = histogram_bins;
    return p;
}

MagnitudeValidation PipelineConfig::magnitude_validation() const
{
    MagnitudeValidation v;
    v.min_angle_deg = min_angle_deg;
    v.max_residual = max_residual;
    v.min_shading_spread = min_shading_spread;
    return v;
}

InterpolationParams PipelineConfig::interpolation() const
{
    InterpolationParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.epsilon = epsilon;
    return p;
}

RecoveryParams PipelineConfig::recovery() const { return {t0, gamma, mode}; }

void set_config_field(PipelineConfig& cfg, const std::string& key, const std::string& value)
{
    for (const Field& f : fields()) {
        if (key == f.name) {
            f.set(cfg, KeyValue{key, value, 0});
            return;
        }
    }
    throw ConfigError(kStage, "unknown key '" + key + "'");
}

PipelineConfig load_config(std::string_view text, PipelineConfig base)
{
    for (const KeyValue& kv : parse_key_values(text, kStage)) {
        bool known = false;
        for (const Field& f : fields()) {
            if (kv.key == f.name) {
                f.set(base, kv);
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError(kStage, "line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
        }
    }
    base.validate();
    return base;
}

std::string serialize_config(const PipelineConfig& cfg)
{
    std::ostringstream out;
    for (const Field& f : fields()) {
        out << f.name << ": " << f.get(cfg) << '\n';
    }
    return out.str();
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const Field& f : fields()) {
        keys.emplace_back(f.name);
    }
    return keys;
}

}  // namespace dehaze
