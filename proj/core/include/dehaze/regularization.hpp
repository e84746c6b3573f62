#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dehaze/dark_channel.hpp"
#include "dehaze/image.hpp"

namespace dehaze {

struct IndexedPoint {
    FeatureVector feature;
    double payload = 0.0;
};

struct NearestResult {
    std::size_t index = 0;  // insertion index of the matched point
    double payload = 0.0;
    double squared_distance = 0.0;
};

/// Exact 1-NN over 5-D Euclidean feature vectors (k-d tree, median splits on the
/// widest dimension). Ties resolve to the lowest insertion index. Immutable after
/// construction; concurrent queries are safe.
class FeatureIndex {
public:
    explicit FeatureIndex(std::vector<IndexedPoint> points);

    NearestResult nearest(const FeatureVector& query) const;
    std::size_t size() const { return points_.size(); }
    const IndexedPoint& point(std::size_t i) const { return points_[i]; }

private:
    struct Node {
        int dim = -1;  // -1 for leaves
        double split = 0.0;
        int left = -1;
        int right = -1;
        int begin = 0;  // leaf range in order_
        int end = 0;
    };

    int build(int begin, int end);
    void search(int node, const FeatureVector& q, NearestResult& best) const;

    std::vector<IndexedPoint> points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

FeatureIndex build_feature_index(std::vector<IndexedPoint> anchors);

/// t(x) = payload of the anchor nearest to to_feature_vector(img, x, y, lambda).
ScalarMap nn_regularize_transmission(const Image& img, std::span<const Anchor> anchors, double lambda,
                                     int threads = 1);

/// Compressed sparse row matrix with sorted column indices.
struct SparseMatrix {
    int n = 0;
    std::vector<int> row_start;
    std::vector<int> col;
    std::vector<double> val;

    double at(int r, int c) const;
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<std::vector<double>> to_dense() const;
};

/// Sparse per-pixel airlight estimates a~(x) with their uncertainty.
struct AirlightEstimates {
    ScalarMap value;
    ScalarMap sigma;
    std::vector<std::uint8_t> valid;
};

/// Quadratic energy (a - a~)^T S (a - a~) + alpha a^T L a + beta b^T a over a
/// 4-connected pixel graph; its minimiser solves (S + alpha L) a = S a~ - beta/2 b.
struct InterpolationSystem {
    int width = 0;
    int height = 0;
    std::vector<double> data_weights;  // diagonal of S, 1/sigma^2 rescaled into [0,1]
    std::vector<double> estimates;     // a~, zero where unestimated
    std::vector<double> linear;        // b(x) = 1 / max(|I(x)|, eps)
    SparseMatrix laplacian;
    SparseMatrix matrix;  // S + alpha L
    std::vector<double> rhs;
    double alpha = 0.1;
    double beta = 0.001;

    std::size_t dimension() const { return data_weights.size(); }
    double energy(std::span<const double> a) const;
};

struct InterpolationParams {
    double alpha = 0.1;
    double beta = 0.001;
    double epsilon = 1e-4;
    /// Floor applied to sigma before inverting it.
    double sigma_floor = 1e-3;
};

InterpolationSystem assemble_interpolation_system(const AirlightEstimates& est, const Image& img,
                                                  const InterpolationParams& params = {});

struct SolveResult {
    ScalarMap field;
    double relative_residual = 0.0;
    int iterations = 0;
};

/// Diagonally preconditioned conjugate gradients from a~ extended by zero.
/// Rows with an empty diagonal keep their initial value. The result is clamped
/// to [0, clamp_max]. Throws NumericError carrying the last residual when
/// max_iter is reached; max_iter <= 0 selects max(n, 64).
SolveResult solve_airlight_field(const InterpolationSystem& system, double tol = 1e-6, int max_iter = 0,
                                 double clamp_max = 1.0);

}  // namespace dehaze
