#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "t2u/constants.hpp"
#include "t2u/errors.hpp"

namespace t2u {

enum class ArrayLayout { Linear, SquarePlanar };

inline int integer_sqrt_exact(int n, const char* what) {
    if (n <= 0) throw ConfigError(std::string(what) + " must be positive");
    const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (r * r != n) throw ConfigError(std::string(what) + " must be a perfect square");
    return r;
}

struct ArrayGeometry {
    int element_count = 1;
    double spacing_wavelengths = 0.5;
    ArrayLayout layout = ArrayLayout::Linear;

    static ArrayGeometry bs_uniform_linear(int n) { return {n, 0.5, ArrayLayout::Linear}; }

    static ArrayGeometry ris_square_planar(int m) {
        return {m, 0.25, ArrayLayout::SquarePlanar};
    }

    int side() const {
        return layout == ArrayLayout::SquarePlanar
                   ? integer_sqrt_exact(element_count, "planar element count")
                   : element_count;
    }

    void validate() const {
        if (element_count < 1) throw ConfigError("element_count must be >= 1");
        if (!(spacing_wavelengths > 0.0)) throw ConfigError("spacing_wavelengths must be > 0");
        if (layout == ArrayLayout::SquarePlanar)
            integer_sqrt_exact(element_count, "planar element count");
    }
};

// Steering vector of an n-element half-wavelength ULA towards azimuth.
// Entry n: exp(j*pi*n*sin(azimuth)). Unnormalized (unit-modulus entries).
inline std::vector<std::complex<double>> ula_steering(int n, double azimuth_rad) {
    if (n < 1) throw ConfigError("ULA size must be >= 1");
    std::vector<std::complex<double>> a(static_cast<std::size_t>(n));
    const double step = kPi * std::sin(azimuth_rad);
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = std::polar(1.0, step * i);
    return a;
}

// Steering vector of a sqrt(m) x sqrt(m) quarter-wavelength planar array for a
// wave with azimuth theta and elevation-from-boresight psi. Element (u, v) is
// flattened to index v*side + u and carries phase
//   (pi/2) * (u*cos(theta) + v*sin(theta)) * sin(psi).
inline std::vector<std::complex<double>> upa_steering(int m, double theta_rad, double psi_rad) {
    const int side = integer_sqrt_exact(m, "planar element count");
    std::vector<std::complex<double>> a(static_cast<std::size_t>(m));
    const double su = 0.5 * kPi * std::cos(theta_rad) * std::sin(psi_rad);
    const double sv = 0.5 * kPi * std::sin(theta_rad) * std::sin(psi_rad);
    for (int v = 0; v < side; ++v)
        for (int u = 0; u < side; ++u)
            a[static_cast<std::size_t>(v) * side + u] = std::polar(1.0, su * u + sv * v);
    return a;
}

// Geometric sum D_n(x) = sum_{i=0}^{n-1} exp(j*pi*i*x). Exactly periodic in x
// with period 2, so reduce first and handle the removable singularity at 0.
inline std::complex<double> dirichlet_sum(int n, double x) {
    const double xr = std::remainder(x, 2.0);
    const double half = 0.5 * kPi * xr;
    const double denom = std::sin(half);
    if (std::abs(denom) < 1e-9) {
        // xr within ~6e-10 of zero; sum = n * exp(j*pi*(n-1)*xr/2) + O(n^3 xr^2)
        return std::polar(static_cast<double>(n), half * (n - 1));
    }
    return std::polar(std::sin(n * half) / denom, half * (n - 1));
}

// Two-way beamspace coupling through a conjugate-matched transmit/receive beam
// pair steered at sin_beam, for a scatterer at sin_target:
//   (w^H a)(a^H f) with w = f = a(beam)/sqrt(n)  =>  |D_n(sin_target - sin_beam)|^2 / n.
// Real and non-negative; the steering mismatch enters only through magnitude.
inline double two_way_beam_gain(int n, double sin_beam, double sin_target) {
    const std::complex<double> d = dirichlet_sum(n, sin_target - sin_beam);
    return std::norm(d) / static_cast<double>(n);
}

// Transmit/receive beam bank at the BS. Column q is the unit-norm steering
// beam a(sin_azimuth[q])/sqrt(n); the sensing combiner reuses the precoder
// columns. Each beam carries a range gate center and the per-stream share of
// the transmit power.
struct Beamformers {
    int bs_elements = 1;
    std::vector<double> sin_azimuth;   // steering direction per column
    std::vector<double> gate_range_m;  // matched range-bin center per column
    double per_stream_power_w = 0.0;   // sigma_s^2 / S

    int stream_count() const { return static_cast<int>(sin_azimuth.size()); }

    void validate() const {
        if (bs_elements < 1) throw StructureError("beamformer needs bs_elements >= 1");
        if (sin_azimuth.empty()) throw StructureError("beamformer has no columns");
        if (sin_azimuth.size() != gate_range_m.size())
            throw StructureError("beam directions and range gates disagree in count");
        if (!(per_stream_power_w > 0.0))
            throw StructureError("per_stream_power_w must be > 0");
    }
};

} // namespace t2u
