#include "dehaze/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dehaze/parallel.hpp"

namespace dehaze {

namespace {
constexpr int kLeafSize = 8;
}

FeatureIndex::FeatureIndex(std::vector<IndexedPoint> points) : points_(std::move(points))
{
    if (points_.empty()) {
        throw ConfigError("regularization", "feature index needs at least one anchor");
    }
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, static_cast<int>(points_.size()));
}

int FeatureIndex::build(int begin, int end)
{
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    if (end - begin <= kLeafSize) {
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }
    int dim = 0;
    double widest = -1.0;
    for (int d = 0; d < 5; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int i = begin; i < end; ++i) {
            const double v = points_[order_[i]].feature.v[d];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            dim = d;
        }
    }
    if (!(widest > 0.0)) {
        // All points coincide: a leaf, however large.
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }
    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
        return points_[a].feature.v[dim] < points_[b].feature.v[dim];
    });
    const double split = points_[order_[mid]].feature.v[dim];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[id].dim = dim;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void FeatureIndex::search(int node_id, const FeatureVector& q, NearestResult& best) const
{
    const Node& node = nodes_[node_id];
    if (node.dim < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const int idx = order_[i];
            const double d = q.squared_distance(points_[idx].feature);
            if (d < best.squared_distance || (d == best.squared_distance && static_cast<std::size_t>(idx) < best.index)) {
                best = {static_cast<std::size_t>(idx), points_[idx].payload, d};
            }
        }
        return;
    }
    // Left holds values <= split, right values >= split.
    const double diff = q.v[node.dim] - node.split;
    const int near = diff <= 0.0 ? node.left : node.right;
    const int far = diff <= 0.0 ? node.right : node.left;
    search(near, q, best);
    // Equal distance must still be explored for the index tie-break.
    if (diff * diff <= best.squared_distance) {
        search(far, q, best);
    }
}

NearestResult FeatureIndex::nearest(const FeatureVector& query) const
{
    NearestResult best{std::numeric_limits<std::size_t>::max(), 0.0, std::numeric_limits<double>::infinity()};
    search(0, query, best);
    return best;
}

FeatureIndex build_feature_index(std::vector<IndexedPoint> anchors) { return FeatureIndex(std::move(anchors)); }

ScalarMap nn_regularize_transmission(const Image& img, std::span<const Anchor> anchors, double lambda, int threads)
{
    if (anchors.empty()) {
        throw ConfigError("regularization", "no anchors to propagate");
    }
    std::vector<IndexedPoint> points;
    points.reserve(anchors.size());
    for (const Anchor& a : anchors) {
        points.push_back({to_feature_vector(img, a.x, a.y, lambda), a.t});
    }
    const FeatureIndex index(std::move(points));
    ScalarMap out(img.width(), img.height());
    parallel_for(img.height(), threads, [&](int y) {
        for (int x = 0; x < img.width(); ++x) {
            out.at(x, y) = std::clamp(index.nearest(to_feature_vector(img, x, y, lambda)).payload, 0.0, 1.0);
        }
    });
    return out;
}

double SparseMatrix::at(int r, int c) const
{
    const auto first = col.begin() + row_start[r];
    const auto last = col.begin() + row_start[r + 1];
    const auto it = std::lower_bound(first, last, c);
    return (it != last && *it == c) ? val[it - col.begin()] : 0.0;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int k = row_start[r]; k < row_start[r + 1]; ++k) {
            s += val[k] * x[col[k]];
        }
        y[r] = s;
    }
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const
{
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (int r = 0; r < n; ++r) {
        for (int k = row_start[r]; k < row_start[r + 1]; ++k) {
            d[r][col[k]] = val[k];
        }
    }
    return d;
}

double InterpolationSystem::energy(std::span<const double> a) const
{
    double data = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = a[i] - estimates[i];
        data += data_weights[i] * e * e;
        lin += linear[i] * a[i];
    }
    std::vector<double> la(a.size());
    laplacian.multiply(a, la);
    const double smooth = std::inner_product(a.begin(), a.end(), la.begin(), 0.0);
    return data + alpha * smooth + beta * lin;
}

InterpolationSystem assemble_interpolation_system(const AirlightEstimates& est, const Image& img,
                                                  const InterpolationParams& params)
{
    const int w = img.width();
    const int h = img.height();
    const std::size_t n = img.pixel_count();
    if (!est.value.same_shape(img) || !est.sigma.same_shape(img) || est.valid.size() != n) {
        throw ConfigError("interpolation", "estimates do not match the image");
    }
    if (!(params.epsilon > 0.0)) {
        throw ConfigError("interpolation", "epsilon must be positive");
    }
    InterpolationSystem sys;
    sys.width = w;
    sys.height = h;
    sys.alpha = params.alpha;
    sys.beta = params.beta;
    sys.data_weights.assign(n, 0.0);
    sys.estimates.assign(n, 0.0);
    sys.linear.assign(n, 0.0);

    double max_weight = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (est.valid[i]) {
            const double s = std::max(est.sigma[i], params.sigma_floor);
            sys.data_weights[i] = 1.0 / (s * s);
            sys.estimates[i] = est.value[i];
            max_weight = std::max(max_weight, sys.data_weights[i]);
        }
    }
    if (max_weight > 0.0) {
        for (double& v : sys.data_weights) {
            v /= max_weight;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        sys.linear[i] = 1.0 / std::max(norm(img.pixel(i)), params.epsilon);
    }

    const auto edge_weight = [&](std::size_t p, std::size_t q) {
        const Rgb d = img.pixel(p) - img.pixel(q);
        return 1.0 / (dot(d, d) + params.epsilon);
    };

    SparseMatrix& L = sys.laplacian;
    L.n = static_cast<int>(n);
    L.row_start.assign(n + 1, 0);
    L.col.reserve(5 * n);
    L.val.reserve(5 * n);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            // Neighbours in increasing index order: up, left, (self), right, down.
            std::array<std::pair<int, double>, 4> nb{};
            int count = 0;
            if (y > 0) {
                nb[count++] = {static_cast<int>(p - w), edge_weight(p, p - w)};
            }
            if (x > 0) {
                nb[count++] = {static_cast<int>(p - 1), edge_weight(p, p - 1)};
            }
            const int before_self = count;
            if (x + 1 < w) {
                nb[count++] = {static_cast<int>(p + 1), edge_weight(p, p + 1)};
            }
            if (y + 1 < h) {
                nb[count++] = {static_cast<int>(p + w), edge_weight(p, p + w)};
            }
            double degree = 0.0;
            for (int k = 0; k < count; ++k) {
                degree += nb[k].second;
            }
            for (int k = 0; k < count; ++k) {
                if (k == before_self) {
                    L.col.push_back(static_cast<int>(p));
                    L.val.push_back(degree);
                }
                L.col.push_back(nb[k].first);
                L.val.push_back(-nb[k].second);
            }
            if (before_self == count) {
                L.col.push_back(static_cast<int>(p));
                L.val.push_back(degree);
            }
            L.row_start[p + 1] = static_cast<int>(L.col.size());
        }
    }

    sys.matrix = L;
    for (double& v : sys.matrix.val) {
        v *= params.alpha;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = sys.matrix.row_start[i]; k < sys.matrix.row_start[i + 1]; ++k) {
            if (sys.matrix.col[k] == static_cast<int>(i)) {
                sys.matrix.val[k] += sys.data_weights[i];
            }
        }
    }
    sys.rhs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sys.rhs[i] = sys.data_weights[i] * sys.estimates[i] - 0.5 * params.beta * sys.linear[i];
    }
    return sys;
}

SolveResult solve_airlight_field(const InterpolationSystem& system, double tol, int max_iter, double clamp_max)
{
    const SparseMatrix& M = system.matrix;
    const std::size_t n = system.dimension();
    if (max_iter <= 0) {
        max_iter = static_cast<int>(std::max<std::size_t>(n, 64));
    }
    std::vector<double> diag(n, 0.0);
    std::vector<std::uint8_t> active(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = M.at(static_cast<int>(i), static_cast<int>(i));
        if (!(diag[i] > 0.0)) {
            active[i] = 0;
        }
    }
    std::vector<double> x = system.estimates;
    std::vector<double> r(n);
    std::vector<double> z(n);
    std::vector<double> p(n);
    std::vector<double> q(n);

    // Pinned rows: r = 0, direction 0, so they never move.
    const auto mask = [&](std::vector<double>& v) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) {
                v[i] = 0.0;
            }
        }
    };
    M.multiply(x, q);
    double rhs_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = system.rhs[i] - q[i];
        if (active[i]) {
            rhs_norm += system.rhs[i] * system.rhs[i];
        }
    }
    mask(r);
    rhs_norm = std::sqrt(rhs_norm);
    if (rhs_norm == 0.0) {
        rhs_norm = 1.0;
    }
    const auto residual_norm = [&] { return std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0)); };

    SolveResult out;
    double rel = residual_norm() / rhs_norm;
    int it = 0;
    if (rel > tol) {
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = active[i] ? r[i] / diag[i] : 0.0;
        }
        p = z;
        double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
        for (it = 1; it <= max_iter; ++it) {
            M.multiply(p, q);
            mask(q);
            const double pq = std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
            if (!(pq > 0.0)) {
                throw NumericError("interpolation", "system is not positive definite");
            }
            const double step = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += step * p[i];
                r[i] -= step * q[i];
            }
            rel = residual_norm() / rhs_norm;
            if (rel <= tol) {
                break;
            }
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = active[i] ? r[i] / diag[i] : 0.0;
            }
            const double rz_next = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = z[i] + beta * p[i];
            }
        }
        if (rel > tol) {
            throw NumericError("interpolation", "solver stopped after " + std::to_string(max_iter) +
                                                    " iterations with relative residual " + std::to_string(rel));
        }
    }
    out.relative_residual = rel;
    out.iterations = it;
    out.field = ScalarMap(system.width, system.height);
    for (std::size_t i = 0; i < n; ++i) {
        out.field[i] = std::clamp(x[i], 0.0, clamp_max);
    }
    return out;
}

}  // namespace dehaze
