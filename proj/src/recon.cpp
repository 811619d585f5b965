#include "cspat/recon.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cspat {

ImageGrid backproject(const Sinogram& filtered, int n) {
    if (filtered.kind != SinogramKind::filtered)
        throw std::invalid_argument("backproject: filtered sinogram required");
    if (n < 2) throw std::invalid_argument("backproject: grid size must be at least 2");

    const DetectorGeometry& g = filtered.geometry;
    const double R = g.detector_radius;
    const double h = g.radial_step();
    // The boundary integral of the (1/pi)-normalized filtered trace
    // reconstructs f / pi; the pi is folded into the quadrature weight.
    const double weight = M_PI * g.angular_weight();
    const int n_r = g.num_radial;

    std::vector<Vec2> detectors(g.num_detectors);
    for (int j = 0; j < g.num_detectors; ++j) detectors[j] = g.detector_position(j);

    ImageGrid image(n, R);
    for (int b = 0; b < n; ++b) {
        const double y = image.pixel_coord(b);
        for (int a = 0; a < n; ++a) {
            const double x = image.pixel_coord(a);
            if (x * x + y * y > R * R) continue;  // formula holds inside the disc
            double acc = 0.0;
            for (int j = 0; j < g.num_detectors; ++j) {
                const double dx = x - detectors[j].x, dy = y - detectors[j].y;
                const double r = std::sqrt(dx * dx + dy * dy);
                const double pos = r / h;
                const int k = static_cast<int>(pos);
                if (k >= n_r - 1) continue;  // beyond the radial grid: no contribution
                const double frac = pos - k;
                const double* row = filtered.row(j);
                acc += row[k] + frac * (row[k + 1] - row[k]);
            }
            image.at(a, b) = weight * acc;
        }
    }
    return image;
}

Metrics compare(const ImageGrid& image, const ImageGrid& reference) {
    if (image.n != reference.n || image.extent != reference.extent)
        throw std::invalid_argument("compare: grids do not match");
    double ref_l2 = 0.0, ref_l1 = 0.0;
    for (double v : reference.values) {
        ref_l2 += v * v;
        ref_l1 += std::abs(v);
    }
    if (ref_l2 == 0.0) throw std::invalid_argument("compare: reference is identically zero");

    Metrics m;
    double diff_l2 = 0.0, diff_l1 = 0.0;
    for (std::size_t i = 0; i < image.values.size(); ++i) {
        const double d = image.values[i] - reference.values[i];
        diff_l2 += d * d;
        diff_l1 += std::abs(d);
        m.max_abs = std::max(m.max_abs, std::abs(d));
    }
    m.rmse = std::sqrt(diff_l2 / image.values.size());
    m.rel_l2 = std::sqrt(diff_l2 / ref_l2);
    m.rel_l1 = diff_l1 / ref_l1;
    return m;
}

}  // namespace cspat
