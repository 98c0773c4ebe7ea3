#pragma once

namespace sgi {

/// Physical constants (SI). All internal computation is SI; unit-suffixed
/// config values (um, us, mA, G) are converted at the boundary.
struct PhysicalConstants {
    double hbar      = 1.054571817e-34;   // J s
    double mass_rb87 = 1.44316060e-25;    // kg
    double mu_bohr   = 9.2740100783e-24;  // J/T
    double mu0       = 1.25663706212e-6;  // T m/A
    double g_gravity = 9.80665;           // m/s^2
    double lande_gF  = 0.5;
    double a_scatter = 5.18e-9;           // m, 98 a0
};

inline constexpr PhysicalConstants kConst{};

namespace units {
inline constexpr double um    = 1e-6;   // m
inline constexpr double us    = 1e-6;   // s
inline constexpr double ms    = 1e-3;   // s
inline constexpr double mA    = 1e-3;   // A
inline constexpr double gauss = 1e-4;   // T
inline constexpr double mm    = 1e-3;   // m
inline constexpr double nm    = 1e-9;   // m
}  // namespace units

}  // namespace sgi
