#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cspat {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

/// Detector positions on the circle of radius R and the radial sample grid.
///
/// Full-circle mode places N detectors at angles 2*pi*j/N, j = 0..N-1.
/// Limited-angle mode places them equispaced (inclusive endpoints) on the
/// arc [theta0, theta1]. Radial samples are uniform on [0, 2R].
struct DetectorGeometry {
    int num_detectors = 0;     // N
    int num_radial = 0;        // N_r
    double detector_radius = 1.0;
    bool limited_angle = false;
    double theta0 = 0.0;
    double theta1 = 0.0;

    double detector_angle(int j) const {
        if (limited_angle) {
            if (num_detectors == 1) return theta0;
            return theta0 + (theta1 - theta0) * j / (num_detectors - 1);
        }
        return 2.0 * M_PI * j / num_detectors;
    }

    Vec2 detector_position(int j) const {
        const double t = detector_angle(j);
        return {detector_radius * std::cos(t), detector_radius * std::sin(t)};
    }

    double radial_step() const { return 2.0 * detector_radius / (num_radial - 1); }
    double radial_sample(int k) const { return radial_step() * k; }

    /// Quadrature weight of one detector in the backprojection sum:
    /// 1/N on the full circle, dtheta/(2*pi) on an arc.
    double angular_weight() const {
        if (!limited_angle) return 1.0 / num_detectors;
        const double dtheta = (num_detectors > 1)
            ? (theta1 - theta0) / (num_detectors - 1) : (theta1 - theta0);
        return dtheta / (2.0 * M_PI);
    }

    void validate() const {
        if (num_detectors < 1) throw std::invalid_argument("geometry: need at least one detector");
        if (num_radial < 2) throw std::invalid_argument("geometry: need at least two radial samples");
        if (detector_radius <= 0) throw std::invalid_argument("geometry: detector radius must be positive");
        if (limited_angle && !(theta1 > theta0)) throw std::invalid_argument("geometry: arc must have theta1 > theta0");
    }
};

enum class SinogramKind { spherical_means, filtered, sparsified, pressure };

std::string to_string(SinogramKind kind);

/// Row-major (detector-major) array of radial traces, one row per detector.
struct Sinogram {
    DetectorGeometry geometry;
    SinogramKind kind = SinogramKind::spherical_means;
    std::vector<double> values;  // geometry.num_detectors rows x geometry.num_radial columns

    Sinogram() = default;
    Sinogram(const DetectorGeometry& g, SinogramKind k)
        : geometry(g), kind(k),
          values(static_cast<std::size_t>(g.num_detectors) * g.num_radial, 0.0) {}

    double& at(int j, int k) { return values[static_cast<std::size_t>(j) * geometry.num_radial + k]; }
    double at(int j, int k) const { return values[static_cast<std::size_t>(j) * geometry.num_radial + k]; }
    double* row(int j) { return values.data() + static_cast<std::size_t>(j) * geometry.num_radial; }
    const double* row(int j) const { return values.data() + static_cast<std::size_t>(j) * geometry.num_radial; }
};

/// Square reconstruction raster over [-R, R]^2. Pixel centers sit at
/// -R + (i + 1/2) * 2R/n in each coordinate; row index b runs over y,
/// column index a over x.
struct ImageGrid {
    int n = 0;
    double extent = 1.0;  // R: grid spans [-R, R]^2
    std::vector<double> values;  // n*n, row-major in y

    ImageGrid() = default;
    ImageGrid(int n_, double extent_)
        : n(n_), extent(extent_), values(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double pixel_coord(int i) const { return -extent + (i + 0.5) * 2.0 * extent / n; }
    double& at(int a, int b) { return values[static_cast<std::size_t>(b) * n + a]; }
    double at(int a, int b) const { return values[static_cast<std::size_t>(b) * n + a]; }
};

}  // namespace cspat
