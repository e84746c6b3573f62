#include "dehaze/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dehaze/color_line.hpp"
#include "dehaze/keyvalue.hpp"
#include "dehaze/parallel.hpp"
#include "dehaze/recovery.hpp"
#include "dehaze/regularization.hpp"

namespace dehaze {

namespace {

void check_size(const Image& img, const PipelineConfig& cfg)
{
    const int need = std::max(cfg.patch_size, cfg.line_patch_size);
    if (img.width() < need || img.height() < need) {
        throw ConfigError("pipeline", "image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                          " is smaller than the patch size " + std::to_string(need));
    }
}

}  // namespace

PipelineResult run_pipeline(const Image& hazy, const PipelineConfig& cfg)
{
    cfg.validate();
    check_size(hazy, cfg);
    const Image img = hazy.clamped();
    PipelineResult res;
    AirlightReport& rep = res.report;

    const Image work = box_blur(img, cfg.prefilter_radius);
    res.dark = dark_channel(work, cfg.patch_size, cfg.threads);
    const Rgb A = estimate_atmospheric_light(work, res.dark);
    rep.atmospheric_light = A;
    res.t_raw = estimate_transmission_dcp(work, A, cfg.dcp(), cfg.threads);

    const ScalarMap bound = pixel_transmission_bound(work, A, cfg.airlight_floor);
    res.anchors = max_filter_anchor_points(bound, cfg.anchor_window, cfg.anchor_top_fraction);
    rep.anchors = static_cast<int>(res.anchors.size());

    // Colour lines, one fit per patch; failures climb the growth ladder.
    const ClassifierParams cls = cfg.classifier();
    const std::vector<PatchRef> patches = iterate_patches(img, cfg.line_patch_size, cfg.line_stride);
    std::vector<LineFit> fits(patches.size());
    parallel_for(static_cast<int>(patches.size()), cfg.threads, [&](int i) {
        LineFit f = fit_and_validate(patches[i], img, cls, cfg.seed);
        if (!f.ok() && cfg.max_line_patch_size > cfg.line_patch_size) {
            LineFit grown = grow_patch_and_refit(patches[i], img, cls, cfg.seed);
            if (grown.ok()) {
                f = std::move(grown);
            }
        }
        fits[i] = std::move(f);
    });
    rep.patches = static_cast<int>(patches.size());

    std::vector<ColorLine> offset_lines;
    std::vector<Rgb> normals;
    std::vector<double> weights;
    for (const LineFit& f : fits) {
        if (!f.ok()) {
            ++rep.lines_rejected;
            ++rep.rejections[std::string("line: ") + std::string(to_string(f.failure))];
            continue;
        }
        ++rep.lines_accepted;
        if (f.line->origin_distance >= cfg.min_line_offset) {
            offset_lines.push_back(*f.line);
            normals.push_back(f.line->normal);
            weights.push_back(cfg.weight_normals ? static_cast<double>(f.line->support) : 1.0);
        }
    }

    // Lines that straddle surfaces are common and their normals scatter; the
    // direction is fitted to the largest set agreeing on one axis.
    const std::vector<int> agree = consensus_normals(normals, {}, cfg.direction_tolerance_deg);
    if (agree.size() >= 3) {
        std::vector<ColorLine> kept_lines;
        std::vector<Rgb> kept_normals;
        std::vector<double> kept_weights;
        for (int k : agree) {
            kept_lines.push_back(offset_lines[k]);
            kept_normals.push_back(normals[k]);
            kept_weights.push_back(weights[k]);
        }
        offset_lines = std::move(kept_lines);
        normals = std::move(kept_normals);
        weights = std::move(kept_weights);
    }
    rep.consensus_lines = static_cast<int>(normals.size());

    Rgb dir{};
    if (normals.size() >= 3) {
        dir = estimate_airlight_direction(normals, weights);
        const RefinementResult refined = refine_airlight_direction(offset_lines, dir, cfg.refine_iterations);
        dir = refined.direction;
        rep.residual_trace = refined.residual_trace;
        rep.direction_source = "color_lines";
    } else {
        dir = normalized(A);
        rep.direction_source = "atmospheric_light";
    }
    rep.direction = dir;
    const double a_mag = dot(A, dir);
    if (!(a_mag > 0.0)) {
        throw NumericError("airlight", "ill-conditioned airlight: zero magnitude along the estimated direction");
    }
    rep.magnitude = a_mag;

    // Per-patch magnitudes as a fraction of the full airlight; later patches overwrite earlier ones.
    const std::size_t n = img.pixel_count();
    res.airlight.direction = dir;
    res.airlight.magnitudes = ScalarMap(img.width(), img.height());
    res.airlight.sigma = ScalarMap(img.width(), img.height());
    res.airlight.valid.assign(n, 0);
    MagnitudeValidation mv = cfg.magnitude_validation();
    mv.max_magnitude = a_mag;
    for (const LineFit& f : fits) {
        if (!f.ok()) {
            continue;
        }
        const ColorLine& line = *f.line;
        AirlightFailure failure = AirlightFailure::none;
        AirlightMagnitude m;
        try {
            m = estimate_airlight_magnitude(line, dir);
            const std::vector<double> proj = inlier_projections(line, f.patch, img);
            failure = validate_airlight_magnitude(line, dir, m, proj, mv);
        } catch (const NumericError&) {
            failure = AirlightFailure::intersection_angle;
        }
        if (failure != AirlightFailure::none) {
            ++rep.magnitudes_rejected;
            ++rep.rejections[std::string("airlight: ") + std::string(to_string(failure))];
            continue;
        }
        ++rep.magnitudes_accepted;
        const double sigma = m.residual / std::sqrt(static_cast<double>(std::max(line.support, 1))) / a_mag;
        const Rect& b = f.patch.bounds;
        for (int idx : line.inliers) {
            const int x = b.x0 + idx % b.width();
            const int y = b.y0 + idx / b.width();
            res.airlight.magnitudes.at(x, y) = m.s / a_mag;
            res.airlight.sigma.at(x, y) = sigma;
            res.airlight.valid[static_cast<std::size_t>(y) * img.width() + x] = 1;
        }
    }

    res.transmission = nn_regularize_transmission(img, res.anchors, cfg.lambda, cfg.threads);

    if (cfg.mode == RecoveryMode::airlight_subtraction) {
        AirlightEstimates est{res.airlight.magnitudes, res.airlight.sigma, res.airlight.valid};
        if (std::none_of(est.valid.begin(), est.valid.end(), [](std::uint8_t v) { return v != 0; })) {
            throw NumericError("airlight", "no patch produced a valid airlight magnitude");
        }
        const InterpolationSystem sys = assemble_interpolation_system(est, img, cfg.interpolation());
        const SolveResult solved = solve_airlight_field(sys, cfg.solver_tol, cfg.solver_max_iter);
        rep.solver_residual = solved.relative_residual;
        rep.solver_iterations = solved.iterations;
        res.airlight_field = solved.field;

        ScalarMap a(img.width(), img.height());
        const double cap = 1.0 - cfg.min_airlight_transmission;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = std::min(res.airlight_field[i], cap);
            a[i] = c * a_mag;
            res.transmission[i] = 1.0 - c;
        }
        const Image jt = direct_transmission_component(img, a, dir);
        ContrastResult restored = contrast_restore(jt, a, dir, luma(a_mag * dir));
        rep.saturated_pixels = restored.saturated;
        res.radiance = std::move(restored.image);
    } else {
        res.radiance = recover_radiance(img, res.transmission, A, cfg.recovery());
    }
    res.output = gamma_correct(res.radiance, cfg.gamma);
    return res;
}

std::string serialize_airlight_report(const AirlightReport& r)
{
    const auto triple = [](const Rgb& v) {
        return format_real(v[0]) + " " + format_real(v[1]) + " " + format_real(v[2]);
    };
    std::ostringstream out;
    out << "atmospheric_light: " << triple(r.atmospheric_light) << '\n'
        << "direction: " << triple(r.direction) << '\n'
        << "direction_source: " << r.direction_source << '\n'
        << "magnitude: " << format_real(r.magnitude) << '\n'
        << "anchors: " << r.anchors << '\n'
        << "patches: " << r.patches << '\n'
        << "lines_accepted: " << r.lines_accepted << '\n'
        << "lines_rejected: " << r.lines_rejected << '\n'
        << "consensus_lines: " << r.consensus_lines << '\n'
        << "magnitudes_accepted: " << r.magnitudes_accepted << '\n'
        << "magnitudes_rejected: " << r.magnitudes_rejected << '\n';
    for (const auto& [reason, count] : r.rejections) {
        std::string key = reason;
        std::replace(key.begin(), key.end(), ' ', '_');
        key.erase(std::remove(key.begin(), key.end(), ':'), key.end());
        out << "rejected_" << key << ": " << count << '\n';
    }
    out << "solver_residual: " << format_real(r.solver_residual) << '\n'
        << "solver_iterations: " << r.solver_iterations << '\n'
        << "saturated_pixels: " << r.saturated_pixels << '\n'
        << "residual_trace:";
    for (double v : r.residual_trace) {
        out << ' ' << format_real(v);
    }
    out << '\n';
    return out.str();
}

}  // namespace dehaze
