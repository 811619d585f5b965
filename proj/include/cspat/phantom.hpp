#pragma once

#include <vector>

#include "cspat/geometry.hpp"

namespace cspat {

/// Disc-shaped component of a piecewise constant initial pressure.
struct Disc {
    Vec2 center;
    double radius = 0.0;
    double amplitude = 1.0;
};

/// Superposition of discs, all strictly inside the detector circle.
/// Overlapping discs add their amplitudes.
struct Phantom {
    std::vector<Disc> discs;
    double detector_radius = 1.0;

    void validate() const;
};

/// Mean of the disc indicator (scaled by amplitude) over the circle of
/// radius r centered at z: amplitude times the fraction of the circle
/// lying inside the disc. Closed form, total in r >= 0.
double spherical_mean_disc(const Disc& disc, const Vec2& z, double r);

/// Spherical means of the phantom sampled on the detector/radial grid.
Sinogram forward_sinogram(const Phantom& phantom, const DetectorGeometry& geometry);

/// Ground-truth raster: each pixel gets the sum of amplitudes of the discs
/// containing its center. Grid spans [-R, R]^2.
ImageGrid rasterize(const Phantom& phantom, int n);

}  // namespace cspat
