#include "dehaze/color_line.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dehaze/linalg3.hpp"

namespace dehaze {

void ClassifierParams::validate() const
{
    if (!(inlier_sigma > 0.0)) {
        throw ConfigError("inlier_sigma must be positive");
    }
    if (!(min_inlier_fraction > 0.2 && min_inlier_fraction < 0.9)) {
        throw ConfigError("min_inlier_fraction must be in (0.2, 0.9)");
    }
    if (!(inlier_prior >= 0.0 && inlier_prior <= 1.0)) {
        throw ConfigError("inlier_prior must be in [0, 1]");
    }
    if (hypotheses < 1) {
        throw ConfigError("hypotheses must be >= 1");
    }
    if (max_patch_growth < 1) {
        throw ConfigError("max_patch_growth must be >= 1");
    }
    if (histogram_bins < 3) {
        throw ConfigError("histogram_bins must be >= 3");
    }
    if (spatial_features && !(spatial_sigma > 0.0)) {
        throw ConfigError("spatial_sigma must be positive");
    }
}

std::string_view to_string(LineFailure f)
{
    switch (f) {
    case LineFailure::none:
        return "none";
    case LineFailure::patch_too_small:
        return "patch too small";
    case LineFailure::degenerate_patch:
        return "degenerate patch";
    case LineFailure::low_support:
        return "low support";
    case LineFailure::positive_slope:
        return "positive slope";
    case LineFailure::unimodality:
        return "unimodality";
    }
    return "unknown";
}

namespace {

// Log-domain normalisation of unnormalised log posteriors.
std::vector<double> softmax(const std::vector<double>& logp)
{
    double top = -std::numeric_limits<double>::infinity();
    for (double v : logp) {
        top = std::max(top, v);
    }
    std::vector<double> out(logp.size(), 0.0);
    if (!std::isfinite(top)) {
        // Every class impossible: fall back to uniform.
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
        return out;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < logp.size(); ++k) {
        out[k] = std::exp(logp[k] - top);
        sum += out[k];
    }
    for (double& v : out) {
        v /= sum;
    }
    return out;
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity(); }

struct PatchPixels {
    std::vector<FeatureVector> features;
    std::vector<Rgb> colors;
};

PatchPixels gather(const PatchRef& patch, const Image& img, double lambda)
{
    PatchPixels out;
    const Rect& b = patch.bounds;
    out.features.reserve(b.area());
    out.colors.reserve(b.area());
    for (int y = b.y0; y < b.y1; ++y) {
        for (int x = b.x0; x < b.x1; ++x) {
            out.features.push_back(to_feature_vector(img, x, y, lambda));
            out.colors.push_back(img.at(x, y));
        }
    }
    return out;
}

struct Moments {
    Rgb mean{};
    Mat3 cov{};
};

Moments moments(const std::vector<Rgb>& colors, const std::vector<int>& subset)
{
    Moments m;
    const double n = static_cast<double>(subset.size());
    for (int i : subset) {
        m.mean = m.mean + colors[i];
    }
    m.mean = (1.0 / n) * m.mean;
    for (int i : subset) {
        const Rgb d = colors[i] - m.mean;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                m.cov[r][c] += d[r] * d[c] / n;
            }
        }
    }
    return m;
}

std::vector<int> inlier_set(const std::vector<ClassPosterior>& post)
{
    std::vector<int> in;
    for (std::size_t i = 0; i < post.size(); ++i) {
        if (post[i].inlier > 0.5) {
            in.push_back(static_cast<int>(i));
        }
    }
    return in;
}

double total_inlier(const std::vector<ClassPosterior>& post)
{
    double s = 0.0;
    for (const auto& p : post) {
        s += p.inlier;
    }
    return s;
}

double quantile(std::vector<double> v, double q)
{
    const auto k = static_cast<std::ptrdiff_t>(q * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + k, v.end());
    return v[static_cast<std::size_t>(k)];
}

// Keeps pixels within a robust tube around the line and inside Tukey fences on
// the projection, so far points along the line's extension lose their leverage.
std::vector<int> trim_by_residual(const std::vector<Rgb>& colors, const std::vector<int>& subset,
                                  const CandidateLine& line)
{
    const Rgb dir = normalized(line.dir);
    std::vector<double> r(subset.size());
    std::vector<double> proj(subset.size());
    for (std::size_t k = 0; k < subset.size(); ++k) {
        const Rgb rel = colors[subset[k]] - line.p0;
        proj[k] = dot(rel, dir);
        r[k] = norm(rel - proj[k] * dir);
    }
    const double cut = std::max(3.0 * 1.4826 * quantile(r, 0.5), 1e-6);
    const double q1 = quantile(proj, 0.25);
    const double q3 = quantile(proj, 0.75);
    const double lo = q1 - 1.5 * (q3 - q1);
    const double hi = q3 + 1.5 * (q3 - q1);
    std::vector<int> kept;
    for (std::size_t k = 0; k < subset.size(); ++k) {
        if (r[k] <= cut && proj[k] >= lo && proj[k] <= hi) {
            kept.push_back(subset[k]);
        }
    }
    return kept;
}

Rgb any_orthogonal(const Rgb& v)
{
    const Rgb helper = std::abs(v[0]) < 0.9 ? Rgb{1, 0, 0} : Rgb{0, 1, 0};
    return normalized(cross(v, helper));
}

}  // namespace

std::vector<double> naive_bayes_posterior(std::span<const double> priors,
                                          const std::vector<std::vector<double>>& likelihoods)
{
    if (priors.empty() || priors.size() != likelihoods.size()) {
        throw ConfigError("naive bayes: one likelihood row per class is required");
    }
    std::vector<double> logp(priors.size());
    for (std::size_t k = 0; k < priors.size(); ++k) {
        double l = safe_log(priors[k]);
        for (double p : likelihoods[k]) {
            l += safe_log(p);
        }
        logp[k] = l;
    }
    return softmax(logp);
}

std::vector<ClassPosterior> classify_patch_pixels(std::span<const FeatureVector> pixels, const CandidateLine& line,
                                                  const ClassifierParams& params)
{
    if (pixels.empty()) {
        throw ConfigError("classify_patch_pixels: empty patch");
    }
    const Rgb dir = normalized(line.dir);
    const double sigma = params.inlier_sigma;
    const double log_norm = -std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
    const double log_prior_in = safe_log(params.inlier_prior);
    const double log_prior_out = safe_log(1.0 - params.inlier_prior);

    double cx = 0.0;
    double cy = 0.0;
    double extent = 0.0;
    if (params.spatial_features) {
        for (const auto& f : pixels) {
            cx += f.sx();
            cy += f.sy();
        }
        cx /= static_cast<double>(pixels.size());
        cy /= static_cast<double>(pixels.size());
        for (const auto& f : pixels) {
            extent = std::max({extent, std::abs(f.sx() - cx), std::abs(f.sy() - cy)});
        }
        extent = std::max(extent, 1e-9);
    }
    const double log_norm_spatial = -std::log(params.spatial_sigma * std::sqrt(2.0 * std::numbers::pi));
    const double log_uniform_spatial = -std::log(2.0 * extent);

    std::vector<ClassPosterior> out(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const Rgb c = {pixels[i].r(), pixels[i].g(), pixels[i].b()};
        const Rgb rel = c - line.p0;
        const Rgb residual = rel - dot(rel, dir) * dir;
        double log_in = log_prior_in;
        double log_out = log_prior_out;  // uniform on the unit cube: density 1 per feature
        for (double r : residual) {
            log_in += log_norm - r * r / (2.0 * sigma * sigma);
        }
        if (params.spatial_features) {
            for (double d : {pixels[i].sx() - cx, pixels[i].sy() - cy}) {
                log_in += log_norm_spatial - d * d / (2.0 * params.spatial_sigma * params.spatial_sigma);
                log_out += log_uniform_spatial;
            }
        }
        const auto p = softmax({log_in, log_out});
        out[i] = {p[0], p[1]};
    }
    return out;
}

LineFit fit_color_line(const PatchRef& patch, const Image& img, const ClassifierParams& params,
                       std::uint64_t rng_seed)
{
    params.validate();
    LineFit result;
    result.patch = patch;
    const PatchPixels px = gather(patch, img, params.feature_lambda);
    const int n = static_cast<int>(px.colors.size());
    if (n < 8) {
        result.failure = LineFailure::patch_too_small;
        return result;
    }
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) {
        all[i] = i;
    }
    const Moments whole = moments(px.colors, all);
    if (whole.cov[0][0] + whole.cov[1][1] + whole.cov[2][2] < 1e-12) {
        result.failure = LineFailure::degenerate_patch;
        return result;
    }

    std::mt19937_64 rng(rng_seed);
    const auto draw = [&] { return static_cast<int>((rng() >> 11) % static_cast<std::uint64_t>(n)); };
    bool found = false;
    double best_score = -1.0;
    CandidateLine best{};
    for (int h = 0; h < params.hypotheses; ++h) {
        const int i = draw();
        const int j = draw();
        const Rgb span = px.colors[j] - px.colors[i];
        if (i == j || norm(span) < 1e-9) {
            continue;
        }
        const CandidateLine cand{px.colors[i], normalized(span)};
        const double score = total_inlier(classify_patch_pixels(px.features, cand, params));
        if (score > best_score) {
            best_score = score;
            best = cand;
            found = true;
        }
    }
    if (!found) {
        result.failure = LineFailure::degenerate_patch;
        return result;
    }

    // Principal-axis refinement over the inliers of the winning hypothesis.
    std::vector<int> inliers = inlier_set(classify_patch_pixels(px.features, best, params));
    CandidateLine line = best;
    for (int round = 0; round < 3 && inliers.size() >= 2; ++round) {
        // The posterior tube is wide next to a short segment; iterate a trim on a
        // robust residual scale so stray pixels near its ends cannot tilt the axis.
        std::vector<int> core = inliers;
        CandidateLine axis = line;
        bool ok = false;
        for (int it = 0; it < 10 && core.size() >= 2; ++it) {
            const Moments m = moments(px.colors, core);
            const SymEigen3 eig = sym_eigen3(m.cov);
            if (!(eig.values[2] > 1e-14)) {
                break;
            }
            Rgb dir = eig.vectors[2];
            if (dir[0] + dir[1] + dir[2] < 0.0) {
                dir = -1.0 * dir;
            }
            axis = {m.mean, dir};
            ok = true;
            std::vector<int> next = trim_by_residual(px.colors, inliers, axis);
            if (next == core) {
                break;
            }
            core = std::move(next);
        }
        if (!ok) {
            break;
        }
        std::vector<int> next = inlier_set(classify_patch_pixels(px.features, axis, params));
        if (next.size() < 2) {
            break;
        }
        line = axis;
        const bool stable = next == inliers;
        inliers = std::move(next);
        if (stable) {
            break;
        }
    }

    ColorLine out;
    out.p0 = line.p0;
    out.dir = normalized(line.dir);
    // Plane through the origin spanned by p1 = p0 and p2 = p0 + dir.
    const Rgb n_raw = cross(out.p0 + out.dir, out.p0);
    out.origin_distance = norm(n_raw);
    out.normal = out.origin_distance > 1e-12 ? (1.0 / out.origin_distance) * n_raw : any_orthogonal(out.dir);
    out.inliers = std::move(inliers);
    out.support = static_cast<int>(out.inliers.size());
    if (out.support < params.min_inlier_fraction * n) {
        result.failure = LineFailure::low_support;
        return result;
    }
    result.line = std::move(out);
    return result;
}

std::vector<double> inlier_projections(const ColorLine& line, const PatchRef& patch, const Image& img)
{
    const Rect& b = patch.bounds;
    std::vector<double> out;
    out.reserve(line.inliers.size());
    for (int k : line.inliers) {
        const Rgb c = img.at(b.x0 + k % b.width(), b.y0 + k / b.width());
        out.push_back(dot(c - line.p0, line.dir));
    }
    return out;
}

bool is_unimodal(std::span<const double> values, int bins)
{
    if (values.size() < 3 || bins < 3) {
        return true;
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (!(range > 0.0)) {
        return true;
    }
    std::vector<int> hist(bins, 0);
    for (double v : values) {
        const int b = std::min(bins - 1, static_cast<int>((v - lo) / range * bins));
        ++hist[b];
    }
    for (int i = 0; i < bins; ++i) {
        for (int j = i + 3; j < bins; ++j) {
            const int peak = std::min(hist[i], hist[j]);
            if (peak < 2) {
                continue;
            }
            bool valley = true;
            for (int k = i + 1; k < j && valley; ++k) {
                valley = 2 * hist[k] <= peak;
            }
            if (valley) {
                return false;
            }
        }
    }
    return true;
}

LineFailure validate_color_line(ColorLine& line, int patch_pixel_count, std::span<const double> projections,
                                const LineValidation& v)
{
    if (line.support < v.min_inlier_fraction * patch_pixel_count) {
        return LineFailure::low_support;
    }
    const auto& d = line.dir;
    const bool any_pos = std::any_of(d.begin(), d.end(), [&](double c) { return c > v.slope_tolerance; });
    const bool any_neg = std::any_of(d.begin(), d.end(), [&](double c) { return c < -v.slope_tolerance; });
    if (any_pos && any_neg) {
        return LineFailure::positive_slope;
    }
    if (any_neg) {
        line.dir = -1.0 * line.dir;
        line.normal = -1.0 * line.normal;
    }
    if (!is_unimodal(projections, v.histogram_bins)) {
        return LineFailure::unimodality;
    }
    return LineFailure::none;
}

std::uint64_t patch_seed(const PatchRef& patch, std::uint64_t base_seed)
{
    // splitmix64 over the patch identity
    std::uint64_t z = base_seed ^ (static_cast<std::uint64_t>(patch.cx) * 0x9E3779B97F4A7C15ULL) ^
                      (static_cast<std::uint64_t>(patch.cy) * 0xC2B2AE3D27D4EB4FULL) ^
                      (static_cast<std::uint64_t>(patch.half_size) * 0x165667B19E3779F9ULL);
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

LineFit fit_and_validate(const PatchRef& patch, const Image& img, const ClassifierParams& params,
                         std::uint64_t base_seed)
{
    LineFit fit = fit_color_line(patch, img, params, patch_seed(patch, base_seed));
    if (!fit.ok()) {
        return fit;
    }
    const std::vector<double> proj = inlier_projections(*fit.line, patch, img);
    const LineValidation v{params.min_inlier_fraction, params.slope_tolerance, params.histogram_bins};
    const LineFailure f = validate_color_line(*fit.line, patch.bounds.area(), proj, v);
    if (f != LineFailure::none) {
        fit.line.reset();
        fit.failure = f;
    }
    return fit;
}

LineFit grow_patch_and_refit(const PatchRef& patch, const Image& img, const ClassifierParams& params,
                             std::uint64_t base_seed)
{
    LineFit last;
    last.patch = patch;
    last.failure = LineFailure::low_support;
    int half = patch.half_size;
    Rect previous = patch.bounds;
    while (half < params.max_patch_growth) {
        half = std::min(2 * half + 1, params.max_patch_growth);
        const PatchRef grown = make_patch(img, patch.cx, patch.cy, half);
        if (grown.bounds == previous) {
            continue;
        }
        previous = grown.bounds;
        last = fit_and_validate(grown, img, params, base_seed);
        if (last.ok()) {
            return last;
        }
    }
    return last;
}

}  // namespace dehaze
