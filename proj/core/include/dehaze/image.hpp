#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dehaze/error.hpp"

namespace dehaze {

/// RGB triple in linear [0,1] units. Also used for directions in RGB space.
using Rgb = std::array<double, 3>;

inline double dot(const Rgb& a, const Rgb& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Rgb cross(const Rgb& a, const Rgb& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Rgb operator+(const Rgb& a, const Rgb& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Rgb operator-(const Rgb& a, const Rgb& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Rgb operator*(double s, const Rgb& a) { return {s * a[0], s * a[1], s * a[2]}; }
double norm(const Rgb& a);
/// Returns a / |a|. Throws NumericError for a zero vector.
Rgb normalized(const Rgb& a);

/// Row-major three channel raster. Channels are expected in [0,1]; the
/// constructors do not clamp, use `clamped()` or `is_normalized()` where it matters.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = {0.0, 0.0, 0.0});

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const { return pixel_count() == 0; }

    Rgb at(int x, int y) const;
    void set(int x, int y, const Rgb& value);
    double channel(int x, int y, int c) const { return data_[index(x, y) * 3 + c]; }
    double& channel(int x, int y, int c) { return data_[index(x, y) * 3 + c]; }

    Rgb pixel(std::size_t i) const { return {data_[3 * i], data_[3 * i + 1], data_[3 * i + 2]}; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    bool is_normalized() const;
    Image clamped() const;

    bool operator==(const Image&) const = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Row-major scalar field with the same geometry as an Image (t(x), d(x), a(x), dark channel).
class ScalarMap {
public:
    ScalarMap() = default;
    ScalarMap(int width, int height, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }

    double at(int x, int y) const { return values_[index(x, y)]; }
    double& at(int x, int y) { return values_[index(x, y)]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool same_shape(const Image& img) const { return img.width() == width_ && img.height() == height_; }
    bool same_shape(const ScalarMap& m) const { return m.width_ == width_ && m.height_ == height_; }

    bool operator==(const ScalarMap&) const = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// Pixel descriptor (R, G, B, lambda*X, lambda*Y) with X, Y normalized by the image size.
struct FeatureVector {
    std::array<double, 5> v{};

    double r() const { return v[0]; }
    double g() const { return v[1]; }
    double b() const { return v[2]; }
    double sx() const { return v[3]; }
    double sy() const { return v[4]; }

    double squared_distance(const FeatureVector& o) const;
    bool operator==(const FeatureVector&) const = default;
};

FeatureVector to_feature_vector(const Image& img, int x, int y, double lambda);

/// Axis aligned half-open rectangle [x0, x1) x [y0, y1).
struct Rect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    int area() const { return width() * height(); }
    bool operator==(const Rect&) const = default;
};

struct PatchRef {
    int cx = 0;
    int cy = 0;
    int half_size = 0;
    Rect bounds;
};

/// Square patch of side 2*half_size+1 around (cx, cy), clipped to the image.
PatchRef make_patch(const Image& img, int cx, int cy, int half_size);

/// Row-major tiling with patches of `size` x `size` every `stride` pixels.
/// Every pixel is covered at least once; patches at the far edges are clipped.
std::vector<PatchRef> iterate_patches(const Image& img, int size, int stride);

/// Mean over a (2r+1) x (2r+1) window clipped at the borders. radius 0 is a copy.
Image box_blur(const Image& img, int radius);

/// Luma with the 0.2989 / 0.5870 / 0.1140 weights.
double luma(const Rgb& pixel);

}  // namespace dehaze
