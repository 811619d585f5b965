#include "cspat/transforms.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace cspat {

namespace {

// Cached FFTW plans per transform length. fftw planning is not reentrant,
// so the cache is the one place that takes a lock; execution runs on the
// cache-owned buffers under the same lock.
class FftEngine {
public:
    static FftEngine& instance() {
        static FftEngine engine;
        return engine;
    }

    void hilbert(const std::vector<double>& in, std::vector<double>& out, double* imag_residue) {
        const int M = static_cast<int>(in.size());
        std::lock_guard<std::mutex> lock(mutex_);
        Plans& p = plans(M);
        for (int k = 0; k < M; ++k) {
            p.buf[k][0] = in[k];
            p.buf[k][1] = 0.0;
        }
        fftw_execute(p.forward);
        // multiplier -i sgn(k): zero at DC and Nyquist
        p.freq[0][0] = p.freq[0][1] = 0.0;
        if (M % 2 == 0) p.freq[M / 2][0] = p.freq[M / 2][1] = 0.0;
        for (int k = 1; k < (M + 1) / 2; ++k) {
            const double re = p.freq[k][0], im = p.freq[k][1];
            p.freq[k][0] = im;    // (-i) * (re + i im) = im - i re
            p.freq[k][1] = -re;
            const int kk = M - k;
            const double re2 = p.freq[kk][0], im2 = p.freq[kk][1];
            p.freq[kk][0] = -im2;  // (+i) * (re + i im) = -im + i re
            p.freq[kk][1] = re2;
        }
        fftw_execute(p.backward);
        out.resize(M);
        double residue = 0.0;
        for (int k = 0; k < M; ++k) {
            out[k] = p.buf[k][0] / M;
            residue = std::max(residue, std::abs(p.buf[k][1]) / M);
        }
        if (imag_residue) *imag_residue = residue;
    }

private:
    struct Plans {
        fftw_complex* buf = nullptr;
        fftw_complex* freq = nullptr;
        fftw_plan forward = nullptr;
        fftw_plan backward = nullptr;
    };

    Plans& plans(int M) {
        auto it = cache_.find(M);
        if (it != cache_.end()) return it->second;
        Plans p;
        p.buf = fftw_alloc_complex(M);
        p.freq = fftw_alloc_complex(M);
        p.forward = fftw_plan_dft_1d(M, p.buf, p.freq, FFTW_FORWARD, FFTW_ESTIMATE);
        p.backward = fftw_plan_dft_1d(M, p.freq, p.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        return cache_.emplace(M, p).first->second;
    }

    std::mutex mutex_;
    std::map<int, Plans> cache_;
};

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Smooth cosine roll-off over the last 2% of the domain.
void taper_tail(std::vector<double>& s) {
    const int n = static_cast<int>(s.size());
    const double start = 0.98 * (n - 1);
    for (int k = static_cast<int>(std::floor(start)); k < n; ++k) {
        if (k < 0) continue;
        const double t = (k - start) / ((n - 1) - start);
        if (t > 0.0) s[k] *= 0.5 * (1.0 + std::cos(M_PI * std::min(t, 1.0)));
    }
}

double lerp_sample(const std::vector<double>& s, double spacing, double r) {
    const double pos = r / spacing;
    const int n = static_cast<int>(s.size());
    if (pos <= 0.0) return s[0];
    if (pos >= n - 1) return s[n - 1];
    const int k = static_cast<int>(pos);
    const double frac = pos - k;
    return s[k] + frac * (s[k + 1] - s[k]);
}

}  // namespace

std::vector<double> periodic_hilbert(const std::vector<double>& signal, double* imag_residue) {
    if (signal.size() < 2 || signal.size() % 2 != 0)
        throw std::invalid_argument("periodic_hilbert: length must be even and at least 2");
    std::vector<double> out;
    FftEngine::instance().hilbert(signal, out, imag_residue);
    return out;
}

RadialSignal radial_derivative(const RadialSignal& s) {
    const int n = s.size();
    if (n < 3) throw std::invalid_argument("radial_derivative: need at least three samples");
    RadialSignal out;
    out.spacing = s.spacing;
    out.samples.resize(n);
    const double inv2h = 1.0 / (2.0 * s.spacing);
    const auto& f = s.samples;
    out.samples[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
    for (int k = 1; k < n - 1; ++k) out.samples[k] = (f[k + 1] - f[k - 1]) * inv2h;
    out.samples[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2h;
    return out;
}

RadialSignal hilbert_radial(const RadialSignal& s, Extension ext) {
    const int n = s.size();
    if (n < 3) throw std::invalid_argument("hilbert_radial: need at least three samples");
    if (ext == Extension::odd) {
        const double scale = std::max(1.0, max_abs(s.samples));
        if (std::abs(s.samples[0]) > 1e-8 * scale)
            throw std::invalid_argument("hilbert_radial: odd extension requires s[0] = 0");
    }

    std::vector<double> tapered = s.samples;
    taper_tail(tapered);

    // Period 2x the mirror length: the zero gap keeps the wrapped kernel
    // tails of the periodic transform away from [0, 2R].
    const int M = 4 * (n - 1);
    std::vector<double> u(M, 0.0);
    for (int k = 0; k < n; ++k) u[k] = tapered[k];
    const double sign = (ext == Extension::odd) ? -1.0 : 1.0;
    for (int k = 1; k < n; ++k) u[M - k] = sign * tapered[k];

    std::vector<double> hu = periodic_hilbert(u);

    RadialSignal out;
    out.spacing = s.spacing;
    out.samples.assign(hu.begin(), hu.begin() + n);
    return out;
}

RadialSignal mult_r(const RadialSignal& s) {
    RadialSignal out = s;
    for (int k = 0; k < out.size(); ++k) out.samples[k] *= s.radius(k);
    return out;
}

RadialSignal abel_forward(const RadialSignal& means) {
    const int n = means.size();
    if (n < 3) throw std::invalid_argument("abel_forward: need at least three samples");
    const double scale = std::max(1.0, max_abs(means.samples));
    if (std::abs(means.samples[0]) > 1e-8 * scale)
        throw std::invalid_argument("abel_forward: means must vanish at r = 0");

    // I(t) = int_0^{pi/2} t sin(u) M(t sin u) du, then p = dI/dt.
    const int nq = 4 * n;
    const double du = (M_PI / 2.0) / nq;
    RadialSignal integral;
    integral.spacing = means.spacing;
    integral.samples.resize(n);
    for (int k = 0; k < n; ++k) {
        const double t = means.radius(k);
        double acc = 0.0;
        for (int q = 0; q < nq; ++q) {
            const double u = (q + 0.5) * du;
            const double su = std::sin(u);
            acc += su * lerp_sample(means.samples, means.spacing, t * su);
        }
        integral.samples[k] = t * acc * du;
    }
    return radial_derivative(integral);
}

RadialSignal abel_inverse(const RadialSignal& pressure) {
    const int n = pressure.size();
    if (n < 2) throw std::invalid_argument("abel_inverse: need at least two samples");
    const int nq = 4 * n;
    const double du = (M_PI / 2.0) / nq;
    RadialSignal out;
    out.spacing = pressure.spacing;
    out.samples.resize(n);
    for (int k = 0; k < n; ++k) {
        const double r = pressure.radius(k);
        double acc = 0.0;
        for (int q = 0; q < nq; ++q) {
            const double u = (q + 0.5) * du;
            acc += lerp_sample(pressure.samples, pressure.spacing, r * std::sin(u));
        }
        out.samples[k] = (2.0 / M_PI) * acc * du;
    }
    if (n > 0) out.samples[0] = 0.0;  // integral over an empty interval
    return out;
}

namespace {

RadialSignal apply_one(FilterKind kind, const RadialSignal& s) {
    switch (kind) {
        case FilterKind::derivative: return radial_derivative(s);
        case FilterKind::hilbert: return hilbert_radial(s, Extension::odd);
        case FilterKind::mult_r: return mult_r(s);
        case FilterKind::fbp_filter:
            // The means continue oddly, so their derivative continues evenly.
            return mult_r(hilbert_radial(radial_derivative(s), Extension::even));
        case FilterKind::sparsifier:
            return radial_derivative(apply_one(FilterKind::fbp_filter, s));
        case FilterKind::abel_forward: return abel_forward(s);
        case FilterKind::abel_inverse: return abel_inverse(s);
    }
    throw std::invalid_argument("apply_filter: unknown kind");
}

}  // namespace

void apply_filter_rows(FilterKind kind, double* data, int rows, int n_r, double spacing) {
    RadialSignal s;
    s.spacing = spacing;
    for (int i = 0; i < rows; ++i) {
        s.samples.assign(data + static_cast<std::size_t>(i) * n_r,
                         data + static_cast<std::size_t>(i + 1) * n_r);
        RadialSignal out = apply_one(kind, s);
        std::copy(out.samples.begin(), out.samples.end(), data + static_cast<std::size_t>(i) * n_r);
    }
}

Sinogram apply_filter(FilterKind kind, const Sinogram& sino) {
    SinogramKind out_kind = sino.kind;
    switch (kind) {
        case FilterKind::fbp_filter:
        case FilterKind::sparsifier:
            if (sino.kind != SinogramKind::spherical_means)
                throw std::invalid_argument("apply_filter: " + to_string(sino.kind) +
                                            " input, spherical_means required");
            out_kind = (kind == FilterKind::fbp_filter) ? SinogramKind::filtered
                                                        : SinogramKind::sparsified;
            break;
        case FilterKind::abel_forward:
            if (sino.kind != SinogramKind::spherical_means)
                throw std::invalid_argument("apply_filter: abel_forward needs spherical means");
            out_kind = SinogramKind::pressure;
            break;
        case FilterKind::abel_inverse:
            if (sino.kind != SinogramKind::pressure)
                throw std::invalid_argument("apply_filter: abel_inverse needs a pressure sinogram");
            out_kind = SinogramKind::spherical_means;
            break;
        default:
            break;
    }
    Sinogram out = sino;
    apply_filter_rows(kind, out.values.data(), out.geometry.num_detectors,
                      out.geometry.num_radial, out.geometry.radial_step());
    out.kind = out_kind;
    return out;
}

}  // namespace cspat
