#pragma once

#include "cspat/geometry.hpp"

namespace cspat {

struct Metrics {
    double rmse = 0.0;
    double rel_l2 = 0.0;
    double rel_l1 = 0.0;
    double max_abs = 0.0;
};

/// Backprojection of a filtered sinogram onto an n x n raster:
///   f(x) ~= sum_j w_j g(z_j, |x - z_j|),
/// with w_j the angular quadrature weight (1/N on the full circle), g the
/// filtered trace interpolated linearly in r (zero beyond the radial grid).
/// Pixels outside the detector disc are zero.
ImageGrid backproject(const Sinogram& filtered, int n);

/// Error metrics of an image against a reference on the same grid.
/// The reference must not be identically zero.
Metrics compare(const ImageGrid& image, const ImageGrid& reference);

}  // namespace cspat
