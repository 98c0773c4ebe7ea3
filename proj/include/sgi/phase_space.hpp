#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "sgi/constants.hpp"

namespace sgi {

/// Phase-space description of the split-stop-release sequence in the
/// (z, p/(m omega)) plane: free drift shears, a harmonic stopping pulse of
/// curvature omega rotates.
namespace phase_space {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Rotation by angle omega*t, acting on (z, p/(m omega)).
inline Mat2 rotation(double omega, double t) {
    const double c = std::cos(omega * t), s = std::sin(omega * t);
    return {{{c, s}, {-s, c}}};
}

/// Free-drift shear over time t in the same coordinates.
inline Mat2 shear(double omega, double t) {
    return {{{1.0, omega * t}, {0.0, 1.0}}};
}

inline Mat2 multiply(const Mat2& a, const Mat2& b) {
    Mat2 m{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return m;
}

/// Stopping-pulse duration that rotates a sheared momentum kick onto the
/// position axis: T2 = acot(omega Td) / omega.
inline double optimal_stop_time(double omega, double delay_td) {
    if (omega <= 0.0) throw std::invalid_argument("optimal_stop_time: omega must be positive");
    return std::atan(1.0 / (omega * delay_td)) / omega;
}

/// Amplification of the kick by the drift before stopping: xi = sqrt(1 + (omega Td)^2).
inline double squeeze_factor(double omega, double delay_td) {
    const double x = omega * delay_td;
    return std::sqrt(1.0 + x * x);
}

/// Spatial separation after an optimal stop of a differential kick hbar*k:
/// d = xi hbar k / (m omega).
inline double separation_after_stop(double k, double omega, double delay_td, double mass) {
    return squeeze_factor(omega, delay_td) * kConst.hbar * k / (mass * omega);
}

/// Width of each packet at the stop (focus): sigma_min = xi hbar / (m omega sigma_z0).
inline double focus_width(double sigma_z0, double omega, double delay_td, double mass) {
    return squeeze_factor(omega, delay_td) * kConst.hbar / (mass * omega * sigma_z0);
}

struct FarField {
    double wavelength;      // fringe period lambda = 2 pi hbar t / (m d)
    double envelope_sigma;  // sigma_f = hbar t / (m sigma_min)
    double n_fringes;       // k sigma_z0 / pi, conserved by the sequence
};

inline FarField farfield_fringes(double k, double sigma_z0, double omega, double delay_td,
                                 double mass, double tof) {
    const double d = separation_after_stop(k, omega, delay_td, mass);
    const double smin = focus_width(sigma_z0, omega, delay_td, mass);
    FarField f;
    f.wavelength = 2.0 * M_PI * kConst.hbar * tof / (mass * d);
    f.envelope_sigma = kConst.hbar * tof / (mass * smin);
    f.n_fringes = k * sigma_z0 / M_PI;
    return f;
}

}  // namespace phase_space
}  // namespace sgi
