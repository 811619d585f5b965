#include "cspat/phantom.hpp"

#include <cmath>
#include <stdexcept>

namespace cspat {

std::string to_string(SinogramKind kind) {
    switch (kind) {
        case SinogramKind::spherical_means: return "spherical_means";
        case SinogramKind::filtered: return "filtered";
        case SinogramKind::sparsified: return "sparsified";
        case SinogramKind::pressure: return "pressure";
    }
    return "unknown";
}

void Phantom::validate() const {
    if (detector_radius <= 0.0)
        throw std::invalid_argument("phantom: detector radius must be positive");
    for (const Disc& d : discs) {
        if (!(d.radius > 0.0))
            throw std::invalid_argument("phantom: disc radius must be positive");
        if (!(norm(d.center) + d.radius < detector_radius))
            throw std::invalid_argument("phantom: disc must lie strictly inside the detector circle");
    }
}

double spherical_mean_disc(const Disc& disc, const Vec2& z, double r) {
    const double a = disc.radius;
    const double d = norm(z - disc.center);
    if (d == 0.0)  // detector at the disc center; excluded by containment but kept total
        return r < a ? disc.amplitude : 0.0;
    if (r >= d + a || r <= d - a) return 0.0;
    if (r < a - d) return disc.amplitude;
    double c = (d * d + r * r - a * a) / (2.0 * d * r);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return disc.amplitude * std::acos(c) / M_PI;
}

Sinogram forward_sinogram(const Phantom& phantom, const DetectorGeometry& geometry) {
    phantom.validate();
    geometry.validate();
    if (std::abs(geometry.detector_radius - phantom.detector_radius) >
        1e-12 * phantom.detector_radius)
        throw std::invalid_argument("forward_sinogram: geometry radius does not match phantom");

    Sinogram sino(geometry, SinogramKind::spherical_means);
    for (int j = 0; j < geometry.num_detectors; ++j) {
        const Vec2 z = geometry.detector_position(j);
        double* row = sino.row(j);
        for (const Disc& disc : phantom.discs) {
            for (int k = 0; k < geometry.num_radial; ++k)
                row[k] += spherical_mean_disc(disc, z, geometry.radial_sample(k));
        }
    }
    return sino;
}

ImageGrid rasterize(const Phantom& phantom, int n) {
    if (n < 2) throw std::invalid_argument("rasterize: grid size must be at least 2");
    phantom.validate();
    ImageGrid image(n, phantom.detector_radius);
    for (const Disc& disc : phantom.discs) {
        for (int b = 0; b < n; ++b) {
            const double y = image.pixel_coord(b);
            for (int a = 0; a < n; ++a) {
                const double x = image.pixel_coord(a);
                const double dx = x - disc.center.x, dy = y - disc.center.y;
                if (dx * dx + dy * dy <= disc.radius * disc.radius)
                    image.at(a, b) += disc.amplitude;
            }
        }
    }
    return image;
}

}  // namespace cspat
