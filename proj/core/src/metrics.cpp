#include "dehaze/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dehaze/keyvalue.hpp"

namespace dehaze {

namespace {

void require_same(const Image& a, const Image& b)
{
    if (a.width() != b.width() || a.height() != b.height()) {
        throw ConfigError("metrics", "image dimensions differ (" + std::to_string(a.width()) + "x" +
                                         std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                                         std::to_string(b.height()) + ")");
    }
    if (a.empty()) {
        throw ConfigError("metrics", "empty image");
    }
}

std::vector<double> luma_plane(const Image& img)
{
    std::vector<double> y(img.pixel_count());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = luma(img.pixel(i));
    }
    return y;
}

}  // namespace

double mse(const Image& a, const Image& b)
{
    require_same(a, b);
    auto da = a.data();
    auto db = b.data();
    double s = 0.0;
    for (std::size_t k = 0; k < da.size(); ++k) {
        const double e = da[k] - db[k];
        s += e * e;
    }
    return s / static_cast<double>(da.size());
}

double psnr_from_mse(double m, double peak)
{
    if (!(m > 0.0)) {
        return kPsnrCap;
    }
    // mse stays on the [0,1] scale; a peak of 255 therefore mimics tables that
    // mix 8-bit peaks with normalised errors.
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / m));
}

double psnr(const Image& a, const Image& b, double peak) { return psnr_from_mse(mse(a, b), peak); }

double ssim(const Image& a, const Image& b)
{
    require_same(a, b);
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;
    if (a.width() < kWin || a.height() < kWin) {
        throw ConfigError("metrics", "ssim needs images of at least 11x11");
    }
    double g[kWin];
    double gsum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        const double d = i - kWin / 2;
        g[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        gsum += g[i];
    }
    for (double& v : g) {
        v /= gsum;
    }
    const std::vector<double> ya = luma_plane(a);
    const std::vector<double> yb = luma_plane(b);
    const int w = a.width();
    double total = 0.0;
    int windows = 0;
    for (int y0 = 0; y0 + kWin <= a.height(); ++y0) {
        for (int x0 = 0; x0 + kWin <= w; ++x0) {
            double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (int j = 0; j < kWin; ++j) {
                for (int i = 0; i < kWin; ++i) {
                    const double wt = g[i] * g[j];
                    const std::size_t p = static_cast<std::size_t>(y0 + j) * w + (x0 + i);
                    ma += wt * ya[p];
                    mb += wt * yb[p];
                    saa += wt * ya[p] * ya[p];
                    sbb += wt * yb[p] * yb[p];
                    sab += wt * ya[p] * yb[p];
                }
            }
            const double va = saa - ma * ma;
            const double vb = sbb - mb * mb;
            const double cov = sab - ma * mb;
            total += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) / ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
            ++windows;
        }
    }
    return total / windows;
}

ScalarMap wsnr_weights(const Image& reference)
{
    const int w = reference.width();
    const int h = reference.height();
    const std::vector<double> y = luma_plane(reference);
    const auto at = [&](int x, int yy) { return y[static_cast<std::size_t>(yy) * w + x]; };
    ScalarMap weights(w, h);
    double sum = 0.0;
    for (int yy = 0; yy < h; ++yy) {
        for (int x = 0; x < w; ++x) {
            double gx = 0.0;
            double gy = 0.0;
            if (w > 1) {
                const int xl = std::max(x - 1, 0);
                const int xr = std::min(x + 1, w - 1);
                gx = (at(xr, yy) - at(xl, yy)) / (xr - xl);
            }
            if (h > 1) {
                const int yt = std::max(yy - 1, 0);
                const int yb = std::min(yy + 1, h - 1);
                gy = (at(x, yb) - at(x, yt)) / (yb - yt);
            }
            weights.at(x, yy) = std::sqrt(gx * gx + gy * gy);
            sum += weights.at(x, yy);
        }
    }
    const double mean = sum / static_cast<double>(weights.size());
    for (double& v : weights.values()) {
        v = mean > 0.0 ? v / mean : 1.0;
    }
    return weights;
}

double wsnr(const Image& result, const Image& reference, double peak)
{
    require_same(result, reference);
    const ScalarMap weights = wsnr_weights(reference);
    auto da = result.data();
    auto db = reference.data();
    double s = 0.0;
    for (std::size_t i = 0; i < result.pixel_count(); ++i) {
        for (int c = 0; c < 3; ++c) {
            const double e = da[3 * i + c] - db[3 * i + c];
            s += weights[i] * e * e;
        }
    }
    return psnr_from_mse(s / static_cast<double>(da.size()), peak);
}

double l1_transmission_error(const ScalarMap& t_est, const ScalarMap& t_true, std::span<const std::uint8_t> mask)
{
    if (!t_est.same_shape(t_true) || mask.size() != t_est.size()) {
        throw ConfigError("metrics", "transmission maps and mask differ in size");
    }
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) {
            s += std::abs(t_est[i] - t_true[i]);
            ++n;
        }
    }
    if (n == 0) {
        throw ConfigError("metrics", "empty evaluation mask");
    }
    return s / static_cast<double>(n);
}

QualityReport evaluate_pair(const Image& result, const Image& reference, const ScalarMap* t_est,
                            const ScalarMap* t_true, const EvaluationOptions& opts)
{
    QualityReport r;
    r.mse = mse(result, reference);
    r.psnr = psnr_from_mse(r.mse, opts.peak);
    r.ssim = ssim(result, reference);
    r.wsnr = wsnr(result, reference, opts.peak);
    if (t_est && t_true) {
        std::vector<std::uint8_t> mask(t_true->size(), 1);
        if (opts.mask_sky) {
            for (std::size_t i = 0; i < mask.size(); ++i) {
                mask[i] = (*t_true)[i] >= opts.sky_threshold ? 1 : 0;
            }
        }
        r.l1_transmission = l1_transmission_error(*t_est, *t_true, mask);
        r.mask_coverage = static_cast<double>(std::count(mask.begin(), mask.end(), 1)) /
                          static_cast<double>(mask.size());
    }
    return r;
}

std::string serialize_report(const QualityReport& r)
{
    std::ostringstream out;
    out << "mse: " << format_real(r.mse) << '\n'
        << "psnr: " << format_real(r.psnr) << '\n'
        << "ssim: " << format_real(r.ssim) << '\n'
        << "wsnr: " << format_real(r.wsnr) << '\n';
    if (r.l1_transmission) {
        out << "l1_transmission: " << format_real(*r.l1_transmission) << '\n';
    }
    out << "mask_coverage: " << format_real(r.mask_coverage) << '\n';
    return out.str();
}

QualityReport parse_report(std::string_view text)
{
    const std::string stage = "report";
    QualityReport r;
    for (const KeyValue& kv : parse_key_values(text, stage)) {
        if (kv.key == "mse") {
            r.mse = parse_real(kv, stage);
        } else if (kv.key == "psnr") {
            r.psnr = parse_real(kv, stage);
        } else if (kv.key == "ssim") {
            r.ssim = parse_real(kv, stage);
        } else if (kv.key == "wsnr") {
            r.wsnr = parse_real(kv, stage);
        } else if (kv.key == "l1_transmission") {
            r.l1_transmission = parse_real(kv, stage);
        } else if (kv.key == "mask_coverage") {
            r.mask_coverage = parse_real(kv, stage);
        } else {
            throw ConfigError(stage, "unknown key '" + kv.key + "'");
        }
    }
    return r;
}

QualityReport mean_report(std::span<const QualityReport> reports)
{
    QualityReport m;
    if (reports.empty()) {
        return m;
    }
    m.mask_coverage = 0.0;
    double l1 = 0.0;
    int l1_count = 0;
    for (const QualityReport& r : reports) {
        m.mse += r.mse;
        m.psnr += r.psnr;
        m.ssim += r.ssim;
        m.wsnr += r.wsnr;
        m.mask_coverage += r.mask_coverage;
        if (r.l1_transmission) {
            l1 += *r.l1_transmission;
            ++l1_count;
        }
    }
    const double n = static_cast<double>(reports.size());
    m.mse /= n;
    m.psnr /= n;
    m.ssim /= n;
    m.wsnr /= n;
    m.mask_coverage /= n;
    if (l1_count > 0) {
        m.l1_transmission = l1 / l1_count;
    }
    return m;
}

}  // namespace dehaze
