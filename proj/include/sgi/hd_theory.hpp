#pragma once

#include <cmath>

#include "sgi/constants.hpp"

namespace sgi {
namespace hd {

/// Recombination visibility of a Gaussian state with independent position and
/// momentum widths under final position/momentum mismatches dz, dp:
/// V = exp(-sigma_z^2 dp^2 / 2 hbar^2) exp(-sigma_p^2 dz^2 / 2 hbar^2).
inline double visibility_gaussian(double sigma_z, double sigma_p, double dz, double dp) {
    const double h2 = kConst.hbar * kConst.hbar;
    return std::exp(-sigma_z * sigma_z * dp * dp / (2.0 * h2)) *
           std::exp(-sigma_p * sigma_p * dz * dz / (2.0 * h2));
}

/// Momentum-mismatch visibility of a Thomas-Fermi (inverted-parabola)
/// density, xi = dp z_max / hbar:
/// V = (15 / xi^5) (3 sin xi - xi^2 sin xi - 3 xi cos xi);
/// small-|xi| series V = 1 - xi^2/14 + xi^4/504 below |xi| = 1e-2.
inline double visibility_tf_momentum_xi(double xi) {
    const double ax = std::abs(xi);
    // the closed form cancels catastrophically for small xi; switch to the
    // Taylor series where its truncation error drops below double precision
    if (ax < 1e-1) {
        const double x2 = xi * xi;
        return 1.0 - x2 / 14.0 + x2 * x2 / 504.0 - x2 * x2 * x2 / 33264.0;
    }
    return 15.0 / (ax * ax * ax * ax * ax) *
           (3.0 * std::sin(ax) - ax * ax * std::sin(ax) - 3.0 * ax * std::cos(ax));
}

inline double visibility_tf_momentum(double dp, double z_max) {
    return visibility_tf_momentum_xi(dp * z_max / kConst.hbar);
}

/// Effective Gaussian width of the TF profile for position mismatch.
inline constexpr double kTfSigmaFactor = 0.6249;

/// Position-mismatch visibility of a TF density, Gaussian surrogate with
/// sigma_TF = 0.6249 z_max: V = exp(-dz^2 / (2 sigma_TF^2)).
inline double visibility_tf_position(double dz, double z_max) {
    const double s = kTfSigmaFactor * z_max;
    return std::exp(-dz * dz / (2.0 * s * s));
}

/// Gaussian surrogate for the momentum-mismatch law with sigma_z = 0.41 z_max.
inline double visibility_tf_momentum_gaussian(double dp, double z_max) {
    const double s = 0.41 * z_max;
    return std::exp(-s * s * dp * dp / (2.0 * kConst.hbar * kConst.hbar));
}

struct BecSize {
    double mu;      // chemical potential, J
    double w0;      // TF radius along the axis of the supplied omega_axis
};

/// Thomas-Fermi chemical potential and radius:
/// mu^(5/2) = (15 hbar^2 m^(1/2) / 2^(5/2)) N0 wbar^3 a,  w0 = sqrt(2 mu / m) / omega_axis.
inline BecSize bec_size(double n_atoms, double omega_x, double omega_y, double omega_z,
                        double omega_axis, double mass = kConst.mass_rb87,
                        double a_scatter = kConst.a_scatter) {
    const double wbar3 = omega_x * omega_y * omega_z;
    const double rhs = 15.0 * kConst.hbar * kConst.hbar * std::sqrt(mass) /
                       std::pow(2.0, 2.5) * n_atoms * wbar3 * a_scatter;
    BecSize b;
    b.mu = std::pow(rhs, 0.4);
    b.w0 = std::sqrt(2.0 * b.mu / mass) / omega_axis;
    return b;
}

/// Ballistic expansion of the TF radius after release from a harmonic trap
/// of frequency omega: w(t) = w0 sqrt(1 + (omega t)^2).
inline double tf_expansion(double w0, double omega, double t) {
    return w0 * std::sqrt(1.0 + omega * omega * t * t);
}

}  // namespace hd
}  // namespace sgi
