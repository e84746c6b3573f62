#include "dehaze/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dehaze {

double norm(const Rgb& a) { return std::sqrt(dot(a, a)); }

Rgb normalized(const Rgb& a)
{
    const double n = norm(a);
    if (!(n > 0.0)) {
        throw NumericError("cannot normalize a zero vector");
    }
    return (1.0 / n) * a;
}

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height)
{
    if (width < 0 || height < 0) {
        throw ConfigError("negative image dimensions");
    }
    data_.resize(pixel_count() * 3);
    for (std::size_t i = 0; i < pixel_count(); ++i) {
        data_[3 * i] = fill[0];
        data_[3 * i + 1] = fill[1];
        data_[3 * i + 2] = fill[2];
    }
}

Rgb Image::at(int x, int y) const
{
    const std::size_t i = index(x, y) * 3;
    return {data_[i], data_[i + 1], data_[i + 2]};
}

void Image::set(int x, int y, const Rgb& value)
{
    const std::size_t i = index(x, y) * 3;
    data_[i] = value[0];
    data_[i + 1] = value[1];
    data_[i + 2] = value[2];
}

bool Image::is_normalized() const
{
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

Image Image::clamped() const
{
    Image out = *this;
    for (double& v : out.data_) {
        v = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

ScalarMap::ScalarMap(int width, int height, double fill) : width_(width), height_(height)
{
    if (width < 0 || height < 0) {
        throw ConfigError("negative map dimensions");
    }
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

double FeatureVector::squared_distance(const FeatureVector& o) const
{
    double d = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double e = v[k] - o.v[k];
        d += e * e;
    }
    return d;
}

FeatureVector to_feature_vector(const Image& img, int x, int y, double lambda)
{
    if (!img.contains(x, y)) {
        throw BoundsError("pixel (" + std::to_string(x) + ", " + std::to_string(y) + ") outside " +
                          std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image");
    }
    const Rgb c = img.at(x, y);
    return {{c[0], c[1], c[2], lambda * x / img.width(), lambda * y / img.height()}};
}

PatchRef make_patch(const Image& img, int cx, int cy, int half_size)
{
    PatchRef p;
    p.cx = cx;
    p.cy = cy;
    p.half_size = half_size;
    p.bounds = {std::max(0, cx - half_size), std::max(0, cy - half_size), std::min(img.width(), cx + half_size + 1),
                std::min(img.height(), cy + half_size + 1)};
    return p;
}

std::vector<PatchRef> iterate_patches(const Image& img, int size, int stride)
{
    if (size < 1 || size > std::min(img.width(), img.height())) {
        throw ConfigError("patch size " + std::to_string(size) + " does not fit a " + std::to_string(img.width()) +
                          "x" + std::to_string(img.height()) + " image");
    }
    if (stride < 1 || stride > size) {
        throw ConfigError("patch stride must be in [1, size] to cover every pixel");
    }
    std::vector<PatchRef> out;
    for (int y0 = 0; y0 < img.height(); y0 += stride) {
        for (int x0 = 0; x0 < img.width(); x0 += stride) {
            PatchRef p;
            p.half_size = size / 2;
            p.bounds = {x0, y0, std::min(img.width(), x0 + size), std::min(img.height(), y0 + size)};
            p.cx = (p.bounds.x0 + p.bounds.x1 - 1) / 2;
            p.cy = (p.bounds.y0 + p.bounds.y1 - 1) / 2;
            out.push_back(p);
        }
    }
    return out;
}

double luma(const Rgb& pixel) { return 0.2989 * pixel[0] + 0.5870 * pixel[1] + 0.1140 * pixel[2]; }

Image box_blur(const Image& img, int radius)
{
    if (radius < 0) {
        throw ConfigError("image", "blur radius must be non-negative");
    }
    if (radius == 0 || img.empty()) {
        return img;
    }
    const int w = img.width();
    const int h = img.height();
    Image rows(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - radius);
            const int x1 = std::min(w - 1, x + radius);
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int k = x0; k <= x1; ++k) {
                    s += img.channel(k, y, c);
                }
                rows.channel(x, y, c) = s / (x1 - x0 + 1);
            }
        }
    }
    Image out(w, h);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - radius);
        const int y1 = std::min(h - 1, y + radius);
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int k = y0; k <= y1; ++k) {
                    s += rows.channel(x, k, c);
                }
                out.channel(x, y, c) = s / (y1 - y0 + 1);
            }
        }
    }
    return out;
}

}  // namespace dehaze
