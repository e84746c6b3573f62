#include "dehaze/airlight.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dehaze/linalg3.hpp"

namespace dehaze {

std::string_view to_string(AirlightFailure f)
{
    switch (f) {
    case AirlightFailure::none:
        return "none";
    case AirlightFailure::intersection_angle:
        return "intersection angle";
    case AirlightFailure::close_intersection:
        return "close intersection";
    case AirlightFailure::valid_range:
        return "valid range";
    case AirlightFailure::shading_variability:
        return "shading variability";
    }
    return "unknown";
}

Rgb estimate_airlight_direction(std::span<const Rgb> normals, std::span<const double> weights)
{
    if (normals.size() < 3) {
        throw NumericError("airlight", "ill-conditioned airlight: fewer than 3 normals");
    }
    if (!weights.empty() && weights.size() != normals.size()) {
        throw ConfigError("airlight", "one weight per normal is required");
    }
    // Canonical order: a sign-normalised normal and its weight, sorted.
    struct Item {
        Rgb n;
        double w;
    };
    std::vector<Item> items;
    items.reserve(normals.size());
    for (std::size_t i = 0; i < normals.size(); ++i) {
        Rgb n = normals[i];
        const auto first = std::find_if(n.begin(), n.end(), [](double c) { return c != 0.0; });
        if (first != n.end() && *first < 0.0) {
            n = -1.0 * n;
        }
        items.push_back({n, weights.empty() ? 1.0 : weights[i]});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        return a.n != b.n ? a.n < b.n : a.w < b.w;
    });

    Mat3 cov{};
    double total = 0.0;
    for (const Item& it : items) {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                cov[r][c] += it.w * it.n[r] * it.n[c];
            }
        }
        total += it.w;
    }
    if (!(total > 0.0)) {
        throw NumericError("airlight", "ill-conditioned airlight: zero total weight");
    }
    for (auto& row : cov) {
        for (double& v : row) {
            v /= total;
        }
    }
    const SymEigen3 eig = sym_eigen3(cov);
    const double trace = cov[0][0] + cov[1][1] + cov[2][2];
    if (eig.values[1] - eig.values[0] <= 1e-9 * std::max(1.0, trace)) {
        throw NumericError("airlight", "ill-conditioned airlight: ambiguous smallest eigenspace");
    }
    Rgb dir = eig.vectors[0];
    if (dir[0] + dir[1] + dir[2] < 0.0) {
        dir = -1.0 * dir;
    }
    // Eigenvectors are only defined up to sign; an airlight with a negative
    // component is not physical, so the remainder is projected onto the cone.
    if (std::any_of(dir.begin(), dir.end(), [](double c) { return c < 0.0; })) {
        for (double& c : dir) {
            c = std::max(c, 0.0);
        }
    }
    return normalized(dir);
}

std::vector<int> consensus_normals(std::span<const Rgb> normals, std::span<const double> weights,
                                   double tolerance_deg)
{
    if (!weights.empty() && weights.size() != normals.size()) {
        throw ConfigError("airlight", "one weight per normal is required");
    }
    const double tol = std::sin(tolerance_deg * std::numbers::pi / 180.0);
    const auto weight = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

    // Candidates are enumerated in a canonical order of the sign-normalised normals.
    std::vector<Rgb> canon(normals.size());
    for (std::size_t i = 0; i < normals.size(); ++i) {
        Rgb n = normals[i];
        const auto first = std::find_if(n.begin(), n.end(), [](double c) { return c != 0.0; });
        if (first != n.end() && *first < 0.0) {
            n = -1.0 * n;
        }
        canon[i] = n;
    }
    std::vector<std::size_t> order(normals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return canon[a] != canon[b] ? canon[a] < canon[b] : weight(a) < weight(b);
    });

    double best_score = 0.0;
    double best_spread = 0.0;
    Rgb best{};
    bool found = false;
    for (std::size_t a = 0; a < order.size(); ++a) {
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            Rgb c = cross(canon[order[a]], canon[order[b]]);
            const double len = norm(c);
            if (len < tol) {
                continue;  // near-parallel normals pin down no direction
            }
            c = (1.0 / len) * c;
            if (c[0] + c[1] + c[2] < 0.0) {
                c = -1.0 * c;
            }
            if (std::any_of(c.begin(), c.end(), [](double v) { return v < 0.0; })) {
                continue;
            }
            double score = 0.0;
            double spread = 0.0;
            for (std::size_t k = 0; k < normals.size(); ++k) {
                const double r = std::abs(dot(canon[k], c));
                if (r <= tol) {
                    score += weight(k);
                    spread += weight(k) * r;
                }
            }
            if (!found || score > best_score || (score == best_score && spread < best_spread)) {
                found = true;
                best_score = score;
                best_spread = spread;
                best = c;
            }
        }
    }
    std::vector<int> in;
    if (found) {
        for (std::size_t k = 0; k < normals.size(); ++k) {
            if (std::abs(dot(canon[k], best)) <= tol) {
                in.push_back(static_cast<int>(k));
            }
        }
    }
    return in;
}

AirlightMagnitude estimate_airlight_magnitude(const ColorLine& line, const Rgb& airlight_dir)
{
    const Rgb d = normalized(line.dir);
    const Rgb a = normalized(airlight_dir);
    const double c = dot(d, a);
    if (std::abs(c) >= 1.0 - 1e-9) {
        throw NumericError("airlight", "parallel lines");
    }
    // [1 -c; -c 1] [rho; s] = [-p0.d; p0.a]
    const double pd = dot(line.p0, d);
    const double pa = dot(line.p0, a);
    const double det = 1.0 - c * c;
    AirlightMagnitude m;
    m.rho = (-pd + c * pa) / det;
    m.s = (pa - c * pd) / det;
    m.residual = norm(line.p0 + m.rho * d - m.s * a);
    return m;
}

double line_axis_distance(const ColorLine& line, const Rgb& airlight_dir)
{
    const Rgb d = normalized(line.dir);
    const Rgb a = normalized(airlight_dir);
    const Rgb dxa = cross(d, a);
    const double sin_angle = norm(dxa);
    if (sin_angle < 1e-9) {
        return norm(line.p0 - dot(line.p0, a) * a);
    }
    return std::abs(dot(line.p0, dxa)) / sin_angle;
}

AirlightFailure validate_airlight_magnitude(const ColorLine& line, const Rgb& airlight_dir,
                                            const AirlightMagnitude& m, std::span<const double> projections,
                                            const MagnitudeValidation& v)
{
    const double c = std::clamp(std::abs(dot(normalized(line.dir), normalized(airlight_dir))), 0.0, 1.0);
    const double angle = std::acos(c) * 180.0 / std::numbers::pi;
    if (angle < v.min_angle_deg) {
        return AirlightFailure::intersection_angle;
    }
    if (m.residual > v.max_residual) {
        return AirlightFailure::close_intersection;
    }
    if (m.s < v.min_magnitude || m.s > v.max_magnitude) {
        return AirlightFailure::valid_range;
    }
    double spread = 0.0;
    if (!projections.empty()) {
        const auto [lo, hi] = std::minmax_element(projections.begin(), projections.end());
        spread = *hi - *lo;
    }
    if (spread < v.min_shading_spread) {
        return AirlightFailure::shading_variability;
    }
    return AirlightFailure::none;
}

RefinementResult refine_airlight_direction(std::span<const ColorLine> lines, const Rgb& initial,
                                           int max_iterations, double eps)
{
    const auto total_residual = [&](const Rgb& dir) {
        double s = 0.0;
        for (const ColorLine& l : lines) {
            s += line_axis_distance(l, dir);
        }
        return s;
    };
    RefinementResult out;
    out.direction = normalized(initial);
    out.residual_trace.push_back(total_residual(out.direction));
    std::vector<Rgb> normals;
    normals.reserve(lines.size());
    for (const ColorLine& l : lines) {
        normals.push_back(l.normal);
    }
    // The line-axis distance factors as c_i |N_i . A| with c_i = offset_i / |D_i x A|,
    // so reweighting the normals by c_i^2 / distance_i majorises the residual sum.
    std::vector<double> weights(lines.size());
    for (int it = 0; it < max_iterations; ++it) {
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const double sine = std::max(norm(cross(lines[i].dir, out.direction)), 1e-6);
            const double c = lines[i].origin_distance / sine;
            weights[i] = c * c / (line_axis_distance(lines[i], out.direction) + eps);
        }
        Rgb candidate;
        try {
            candidate = estimate_airlight_direction(normals, weights);
        } catch (const NumericError&) {
            break;
        }
        // Backtrack towards the current direction when the full step overshoots.
        double r = total_residual(candidate);
        for (int half = 0; half < 6 && !(r < out.residual_trace.back()); ++half) {
            const Rgb mid = out.direction + candidate;
            if (norm(mid) < 1e-12) {
                break;
            }
            candidate = normalized(mid);
            r = total_residual(candidate);
        }
        if (!(r < out.residual_trace.back())) {
            break;
        }
        out.direction = candidate;
        out.residual_trace.push_back(r);
    }
    return out;
}

}  // namespace dehaze
