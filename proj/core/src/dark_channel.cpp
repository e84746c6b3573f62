#include "dehaze/dark_channel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "dehaze/parallel.hpp"

namespace dehaze {

void DcpParams::validate() const
{
    if (patch_size < 3 || patch_size % 2 == 0) {
        throw ConfigError("patch_size must be odd and >= 3, got " + std::to_string(patch_size));
    }
    if (!(airlight_floor > 0.0 && airlight_floor <= 0.1)) {
        throw ConfigError("airlight_floor must be in (0, 0.1]");
    }
}

namespace {

// Running extremum of src[0..n) over [i - r, i + r] clipped to the range.
// `better(a, b)` is true when a should replace b as the extremum.
template <class Better>
void sliding_extremum(const double* src, std::ptrdiff_t src_step, double* dst, std::ptrdiff_t dst_step, int n, int r,
                      Better better)
{
    std::deque<int> q;
    int next = 0;
    for (int i = 0; i < n; ++i) {
        const int hi = std::min(n - 1, i + r);
        for (; next <= hi; ++next) {
            const double v = src[next * src_step];
            while (!q.empty() && !better(src[q.back() * src_step], v)) {
                q.pop_back();
            }
            q.push_back(next);
        }
        while (q.front() < i - r) {
            q.pop_front();
        }
        dst[i * dst_step] = src[q.front() * src_step];
    }
}

template <class Better>
ScalarMap separable_filter(const ScalarMap& in, int window, int threads, Better better)
{
    if (window < 1) {
        throw ConfigError("filter window must be >= 1");
    }
    const int w = in.width();
    const int h = in.height();
    const int r = window / 2;
    ScalarMap rows(w, h);
    ScalarMap out(w, h);
    const double* src = in.values().data();
    double* tmp = rows.values().data();
    double* dst = out.values().data();
    parallel_for(h, threads, [&](int y) {
        sliding_extremum(src + static_cast<std::ptrdiff_t>(y) * w, 1, tmp + static_cast<std::ptrdiff_t>(y) * w, 1, w,
                         r, better);
    });
    parallel_for(w, threads, [&](int x) { sliding_extremum(tmp + x, w, dst + x, w, h, r, better); });
    return out;
}

}  // namespace

ScalarMap min_filter(const ScalarMap& in, int window, int threads)
{
    // Keep the older element on ties so equal values never grow the queue.
    return separable_filter(in, window, threads, [](double kept, double incoming) { return kept < incoming; });
}

ScalarMap max_filter(const ScalarMap& in, int window, int threads)
{
    return separable_filter(in, window, threads, [](double kept, double incoming) { return kept > incoming; });
}

ScalarMap channel_min(const Image& img)
{
    ScalarMap out(img.width(), img.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Rgb p = img.pixel(i);
        out[i] = std::min({p[0], p[1], p[2]});
    }
    return out;
}

ScalarMap dark_channel(const Image& img, int patch_size, int threads)
{
    DcpParams{patch_size, 1.0 / 255.0}.validate();
    return min_filter(channel_min(img), patch_size, threads);
}

ScalarMap pixel_transmission_bound(const Image& img, const Rgb& airlight, double airlight_floor)
{
    const Rgb a = {std::max(airlight[0], airlight_floor), std::max(airlight[1], airlight_floor),
                   std::max(airlight[2], airlight_floor)};
    ScalarMap out(img.width(), img.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Rgb p = img.pixel(i);
        const double ratio = std::min({p[0] / a[0], p[1] / a[1], p[2] / a[2]});
        out[i] = std::clamp(1.0 - ratio, 0.0, 1.0);
    }
    return out;
}

ScalarMap estimate_transmission_dcp(const Image& img, const Rgb& airlight, const DcpParams& params, int threads)
{
    params.validate();
    const Rgb a = {std::max(airlight[0], params.airlight_floor), std::max(airlight[1], params.airlight_floor),
                   std::max(airlight[2], params.airlight_floor)};
    ScalarMap ratio(img.width(), img.height());
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        const Rgb p = img.pixel(i);
        ratio[i] = std::min({p[0] / a[0], p[1] / a[1], p[2] / a[2]});
    }
    ScalarMap t = min_filter(ratio, params.patch_size, threads);
    for (double& v : t.values()) {
        v = std::clamp(1.0 - v, 0.0, 1.0);
    }
    return t;
}

Rgb estimate_atmospheric_light(const Image& img, const ScalarMap& dark, double fraction)
{
    if (img.empty() || !dark.same_shape(img)) {
        throw ConfigError("dark channel does not match image");
    }
    const std::size_t n = dark.size();
    const std::size_t keep = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(fraction * n)), 1, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](std::size_t a, std::size_t b) {
        return dark[a] != dark[b] ? dark[a] > dark[b] : a < b;
    });
    std::size_t best = order[0];
    double best_sum = -1.0;
    for (std::size_t k = 0; k < keep; ++k) {
        const Rgb p = img.pixel(order[k]);
        const double s = p[0] + p[1] + p[2];
        if (s > best_sum) {
            best_sum = s;
            best = order[k];
        }
    }
    return img.pixel(best);
}

std::vector<Anchor> max_filter_anchor_points(const ScalarMap& t_raw, int window, double top_fraction)
{
    if (window < 1 || window % 2 == 0) {
        throw ConfigError("anchor window must be odd and >= 1");
    }
    if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
        throw ConfigError("top_fraction must be in (0, 1]");
    }
    const int w = t_raw.width();
    const int h = t_raw.height();
    if (t_raw.size() == 0) {
        throw ConfigError("empty transmission map");
    }
    const int r = window / 2;
    std::vector<Anchor> peaks;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = t_raw.at(x, y);
            bool strict = true;
            for (int yy = std::max(0, y - r); strict && yy <= std::min(h - 1, y + r); ++yy) {
                for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
                    if ((xx != x || yy != y) && t_raw.at(xx, yy) >= v) {
                        strict = false;
                        break;
                    }
                }
            }
            if (strict && (w > 1 || h > 1)) {
                peaks.push_back({x, y, v});
            }
        }
    }
    if (peaks.empty()) {
        const auto values = t_raw.values();
        const auto lo = std::min_element(values.begin(), values.end());
        const auto hi = std::max_element(values.begin(), values.end());  // first of equal maxima
        if (*lo == *hi) {
            return {{w / 2, h / 2, t_raw.at(w / 2, h / 2)}};
        }
        const auto i = static_cast<int>(hi - values.begin());
        return {{i % w, i / w, *hi}};
    }
    const std::size_t keep =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(top_fraction * peaks.size())), 1, peaks.size());
    std::stable_sort(peaks.begin(), peaks.end(), [](const Anchor& a, const Anchor& b) { return a.t > b.t; });
    peaks.resize(keep);
    std::sort(peaks.begin(), peaks.end(), [](const Anchor& a, const Anchor& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    return peaks;
}

}  // namespace dehaze
