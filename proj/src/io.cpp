#include "cspat/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace cspat {

namespace {

struct File {
    std::FILE* f = nullptr;
    explicit File(const std::string& path, const char* mode) : f(std::fopen(path.c_str(), mode)) {
        if (!f) throw std::runtime_error("cannot open " + path);
    }
    ~File() {
        if (f) std::fclose(f);
    }
};

}  // namespace

void write_csv(const std::string& path, const double* data, int rows, int cols) {
    File out(path, "wb");
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c)
            std::fprintf(out.f, c ? ",%.17g" : "%.17g", data[static_cast<std::size_t>(r) * cols + c]);
        std::fputc('\n', out.f);
    }
}

void write_pgm(const std::string& path, const double* data, int rows, int cols) {
    const std::size_t count = static_cast<std::size_t>(rows) * cols;
    double lo = data[0], hi = data[0];
    for (std::size_t i = 1; i < count; ++i) {
        lo = std::min(lo, data[i]);
        hi = std::max(hi, data[i]);
    }
    const double span = hi - lo;

    File out(path, "wb");
    std::fprintf(out.f, "P5\n%d %d\n255\n", cols, rows);
    std::vector<unsigned char> line(cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double v = data[static_cast<std::size_t>(r) * cols + c];
            const double scaled = span > 0.0 ? 255.0 * (v - lo) / span : 0.0;
            line[c] = static_cast<unsigned char>(std::min(255.0, std::max(0.0, scaled + 0.5)));
        }
        std::fwrite(line.data(), 1, line.size(), out.f);
    }

    File sidecar(path + ".scale.txt", "wb");
    std::fprintf(sidecar.f, "min %.17g\nmax %.17g\n", lo, hi);
}

void write_sinogram_csv(const std::string& path, const Sinogram& sino) {
    write_csv(path, sino.values.data(), sino.geometry.num_detectors, sino.geometry.num_radial);
}

void write_sinogram_pgm(const std::string& path, const Sinogram& sino) {
    write_pgm(path, sino.values.data(), sino.geometry.num_detectors, sino.geometry.num_radial);
}

void write_image_csv(const std::string& path, const ImageGrid& image) {
    write_csv(path, image.values.data(), image.n, image.n);
}

void write_image_pgm(const std::string& path, const ImageGrid& image) {
    // top raster row = largest y
    std::vector<double> flipped(image.values.size());
    for (int b = 0; b < image.n; ++b)
        std::copy(image.values.begin() + static_cast<std::size_t>(b) * image.n,
                  image.values.begin() + static_cast<std::size_t>(b + 1) * image.n,
                  flipped.begin() + static_cast<std::size_t>(image.n - 1 - b) * image.n);
    write_pgm(path, flipped.data(), image.n, image.n);
}

void save_matrix_file(const std::string& path, const MeasurementMatrix& A) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    save_matrix(A, out);
}

MeasurementMatrix load_matrix_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_matrix(in);
}

}  // namespace cspat
