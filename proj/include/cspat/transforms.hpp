#pragma once

#include <vector>

#include "cspat/geometry.hpp"

namespace cspat {

/// One radial trace sampled uniformly with step `spacing` starting at r = 0.
struct RadialSignal {
    std::vector<double> samples;
    double spacing = 1.0;

    int size() const { return static_cast<int>(samples.size()); }
    double radius(int k) const { return spacing * k; }
};

enum class FilterKind {
    derivative,   // d/dr
    hilbert,      // H_r on the periodic extension
    mult_r,       // multiplication by r
    fbp_filter,   // r H_r d/dr
    sparsifier,   // d/dr r H_r d/dr
    abel_forward, // spherical means -> pressure trace
    abel_inverse, // pressure trace -> spherical means
};

/// Extension used when periodizing a half-line signal to [-2R, 2R).
/// Spherical means continue oddly; their radial derivative continues evenly.
enum class Extension { odd, even };

/// Discrete Hilbert transform of a periodic signal via the spectral
/// multiplier -i sgn(k) (zero at DC and Nyquist). Input length must be even.
/// If imag_residue is given it receives the largest imaginary component of
/// the inverse transform, which is pure round-off for real input.
std::vector<double> periodic_hilbert(const std::vector<double>& signal,
                                     double* imag_residue = nullptr);

/// Second-order finite differences: central in the interior, one-sided at
/// both ends. Requires at least three samples.
RadialSignal radial_derivative(const RadialSignal& s);

/// Hilbert transform in the radial variable: taper the last 2% of the
/// domain, extend to [-2R, 2R) with the requested parity, apply the
/// periodic transform, restrict back to [0, 2R]. Odd extension requires
/// s[0] = 0 (tolerance 1e-8 relative to the signal magnitude).
RadialSignal hilbert_radial(const RadialSignal& s, Extension ext = Extension::odd);

RadialSignal mult_r(const RadialSignal& s);

/// Pressure trace from spherical means:
///   p(t) = d/dt int_0^t r M(r) / sqrt(t^2 - r^2) dr,
/// evaluated with the substitution r = t sin(u) (midpoint rule, 4x
/// oversampling) followed by radial_derivative.
RadialSignal abel_forward(const RadialSignal& means);

/// Spherical means from a pressure trace:
///   M(r) = 2/pi int_0^r p(t) / sqrt(r^2 - t^2) dt,
/// with the substitution t = r sin(u).
RadialSignal abel_inverse(const RadialSignal& pressure);

/// Apply a radial filter to every row of a rows x n_r array in place.
void apply_filter_rows(FilterKind kind, double* data, int rows, int n_r, double spacing);

/// Row-wise filter on a sinogram. Composite kinds check the input kind
/// (spherical_means for fbp_filter/sparsifier, pressure for abel_inverse)
/// and set the output kind accordingly.
Sinogram apply_filter(FilterKind kind, const Sinogram& sino);

}  // namespace cspat
