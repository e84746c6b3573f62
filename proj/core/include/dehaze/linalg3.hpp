#pragma once

#include <array>

#include "dehaze/image.hpp"

namespace dehaze {

/// Row-major 3x3 matrix.
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Eigen-decomposition of a symmetric 3x3 matrix, eigenvalues ascending.
struct SymEigen3 {
    std::array<double, 3> values{};
    std::array<Rgb, 3> vectors{};  // unit, vectors[k] pairs with values[k]
};

/// Cyclic Jacobi rotations; accurate to rounding also for repeated eigenvalues.
SymEigen3 sym_eigen3(const Mat3& m);

Mat3 outer(const Rgb& a, const Rgb& b);

}  // namespace dehaze
