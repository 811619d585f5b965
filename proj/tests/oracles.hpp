#pragma once

#include <cstdint>
#include <vector>

#include "cspat/expander.hpp"
#include "cspat/phantom.hpp"

// Independent reference implementations used only by tests. They share no
// code path with the library routines they check.
namespace oracle {

/// Circle-quadrature spherical mean of one disc: plain midpoint rule over
/// n_points samples of the indicator.
double spherical_mean_midpoint(const cspat::Disc& disc, const cspat::Vec2& z, double r,
                               long n_points);

/// Adaptive midpoint quadrature of the phantom indicator sum. Cells are
/// subdivided until the distance of the cell midpoint to each disc boundary
/// certifies the indicator constant on the cell (the distance function is
/// r-Lipschitz in the angle), so the result is exact up to the depth cap.
double spherical_mean_adaptive(const cspat::Phantom& phantom, const cspat::Vec2& z, double r);

/// Naive restricted expansion constants: dense matrix, index-vector subset
/// enumeration, boolean row coverage.
cspat::ExpansionReport naive_expansion_constants(const cspat::MeasurementMatrix& A, int s_max);

/// Exact-to-tolerance TV proximal map by accelerated projected ascent on the
/// dual, run to 1e-10.
std::vector<double> tv_prox_dual(const std::vector<double>& v, double weight, bool periodic);

/// Seeded random phantom with up to max_discs discs inside radius R.
cspat::Phantom random_phantom(double R, int max_discs, std::uint64_t seed);

double rel_l2(const std::vector<double>& value, const std::vector<double>& reference);

}  // namespace oracle
