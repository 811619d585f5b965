#pragma once

#include <string>

#include "cspat/expander.hpp"
#include "cspat/geometry.hpp"

namespace cspat {

/// Comma-separated values, '.' decimal separator, '\n' line ends, one row
/// per line, shortest round-trip formatting (%.17g).
void write_csv(const std::string& path, const double* data, int rows, int cols);

/// 8-bit binary PGM (P5) after affine min-max scaling. The scaling
/// constants are recorded in "<path>.scale.txt".
void write_pgm(const std::string& path, const double* data, int rows, int cols);

void write_sinogram_csv(const std::string& path, const Sinogram& sino);
void write_sinogram_pgm(const std::string& path, const Sinogram& sino);
void write_image_csv(const std::string& path, const ImageGrid& image);
void write_image_pgm(const std::string& path, const ImageGrid& image);

void save_matrix_file(const std::string& path, const MeasurementMatrix& A);
MeasurementMatrix load_matrix_file(const std::string& path);

}  // namespace cspat
