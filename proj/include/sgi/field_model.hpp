#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "sgi/constants.hpp"
#include "sgi/numerics.hpp"

namespace sgi {

using Vec3 = std::array<double, 3>;

/// Three parallel wires along x on the chip at y = {-spacing, 0, +spacing},
/// carrying alternating currents {-I, +I, -I}, plus a homogeneous bias along
/// y. Atoms live at z > 0 (distance below the chip surface).
struct ChipGeometry {
    double wire_spacing = 100 * units::um;
    double wire_length = 10 * units::mm;
    double wire_width = 40 * units::um;
    double wire_thickness = 2 * units::um;
    double current = 1.0;                     // A, central wire; side wires carry -current
    double bias_y = 36.7 * units::gauss;      // T
};

enum class FieldModel {
    ThinWire,    // infinite filament wires, closed-form derivatives
    FiniteWire,  // finite length + rectangular cross-section, Biot-Savart quadrature
};

struct FieldSample {
    Vec3 B{};             // T, total field including bias
    double Bmag = 0.0;    // |B|
    Vec3 grad_Bmag{};     // d|B|/d(x,y,z)
    double d2Bmag_dz2 = 0.0;
};

namespace detail {

/// Field of a finite straight segment from a to b carrying current I.
inline Vec3 segment_field(const Vec3& a, const Vec3& b, double current, const Vec3& p) {
    const Vec3 ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const double len = std::sqrt(ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2]);
    const Vec3 u{ab[0] / len, ab[1] / len, ab[2] / len};
    const Vec3 pa{p[0] - a[0], p[1] - a[1], p[2] - a[2]};
    const double t1 = pa[0] * u[0] + pa[1] * u[1] + pa[2] * u[2];
    const double t2 = t1 - len;
    const Vec3 d{pa[0] - t1 * u[0], pa[1] - t1 * u[1], pa[2] - t1 * u[2]};
    const double rho2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    const double rho = std::sqrt(rho2);
    if (rho < 1e-12) return {0.0, 0.0, 0.0};
    const double f = kConst.mu0 * current / (4.0 * M_PI * rho2) *
                     (t1 / std::sqrt(t1 * t1 + rho2) - t2 / std::sqrt(t2 * t2 + rho2));
    // u x d
    return {f * (u[1] * d[2] - u[2] * d[1]),
            f * (u[2] * d[0] - u[0] * d[2]),
            f * (u[0] * d[1] - u[1] * d[0])};
}

struct WireSpec {
    double y;  // wire center in y
    double current;
};

inline std::array<WireSpec, 3> wires(const ChipGeometry& g) {
    return {WireSpec{-g.wire_spacing, -g.current},
            WireSpec{0.0, g.current},
            WireSpec{g.wire_spacing, -g.current}};
}

/// Chip-only field of the infinite-filament model plus analytic derivatives.
/// u = y - y_w, r^2 = u^2 + z^2:
///   By = -c z / r^2,  Bz = c u / r^2,  c = mu0 I / 2 pi.
struct ThinChipField {
    Vec3 B{};
    Vec3 dB_dz{};
    Vec3 dB_dy{};
    Vec3 d2B_dz2{};
};

inline ThinChipField thin_chip_field(const ChipGeometry& g, const Vec3& r) {
    ThinChipField out;
    const double z = r[2];
    for (const auto& w : wires(g)) {
        const double c = kConst.mu0 * w.current / (2.0 * M_PI);
        const double u = r[1] - w.y;
        const double r2 = u * u + z * z;
        if (r2 < 1e-24) throw std::domain_error("thin_chip_field: point on a wire");
        const double r4 = r2 * r2, r6 = r4 * r2;
        out.B[1] += -c * z / r2;
        out.B[2] += c * u / r2;
        out.dB_dz[1] += c * (z * z - u * u) / r4;
        out.dB_dz[2] += -2.0 * c * u * z / r4;
        out.dB_dy[1] += 2.0 * c * u * z / r4;            // = -dBz/dz (div B = 0)
        out.dB_dy[2] += c * (z * z - u * u) / r4;        // = dBy/dz (curl B = 0)
        out.d2B_dz2[1] += 2.0 * c * z * (3.0 * u * u - z * z) / r6;
        out.d2B_dz2[2] += -2.0 * c * u * (u * u - 3.0 * z * z) / r6;
    }
    return out;
}

/// Chip-only field of the finite-geometry model: 32x8 Gauss-Legendre
/// filaments over each wire cross-section (width x thickness). Wires occupy
/// z in [-thickness, 0] (embedded in the chip above the atoms).
inline Vec3 finite_chip_field(const ChipGeometry& g, const Vec3& p) {
    static const GaussLegendre glw(32), glt(8);
    Vec3 B{0.0, 0.0, 0.0};
    for (const auto& w : wires(g)) {
        for (std::size_t i = 0; i < glw.x.size(); ++i) {
            const double yf = w.y + 0.5 * g.wire_width * glw.x[i];
            for (std::size_t j = 0; j < glt.x.size(); ++j) {
                const double zf = -0.5 * g.wire_thickness * (1.0 + glt.x[j]);
                const double frac = 0.25 * glw.w[i] * glt.w[j];  // weights sum to 2 each
                const Vec3 a{-0.5 * g.wire_length, yf, zf};
                const Vec3 b{0.5 * g.wire_length, yf, zf};
                const Vec3 dB = segment_field(a, b, w.current * frac, p);
                B[0] += dB[0];
                B[1] += dB[1];
                B[2] += dB[2];
            }
        }
    }
    return B;
}

inline Vec3 total_field(const ChipGeometry& g, const Vec3& r, FieldModel model) {
    Vec3 B = (model == FieldModel::ThinWire) ? thin_chip_field(g, r).B : finite_chip_field(g, r);
    B[1] += g.bias_y;
    return B;
}

inline double bmag(const ChipGeometry& g, const Vec3& r, FieldModel model) {
    const Vec3 B = total_field(g, r, model);
    return std::sqrt(B[0] * B[0] + B[1] * B[1] + B[2] * B[2]);
}

}  // namespace detail

/// Total field (chip + bias), magnitude, gradient of |B| and second
/// z-derivative of |B|. Thin-wire derivatives are analytic; the finite model
/// uses central finite differences (5 nm step).
inline FieldSample field_at(const ChipGeometry& g, const Vec3& r, FieldModel model) {
    FieldSample s;
    if (model == FieldModel::ThinWire) {
        auto f = detail::thin_chip_field(g, r);
        f.B[1] += g.bias_y;
        s.B = f.B;
        s.Bmag = std::sqrt(f.B[0] * f.B[0] + f.B[1] * f.B[1] + f.B[2] * f.B[2]);
        const double dot_z = f.B[1] * f.dB_dz[1] + f.B[2] * f.dB_dz[2];
        const double dot_y = f.B[1] * f.dB_dy[1] + f.B[2] * f.dB_dy[2];
        s.grad_Bmag = {0.0, dot_y / s.Bmag, dot_z / s.Bmag};
        const double bp2 = f.dB_dz[1] * f.dB_dz[1] + f.dB_dz[2] * f.dB_dz[2];
        const double dot_zz = f.B[1] * f.d2B_dz2[1] + f.B[2] * f.d2B_dz2[2];
        s.d2Bmag_dz2 = (bp2 + dot_zz - s.grad_Bmag[2] * s.grad_Bmag[2]) / s.Bmag;
    } else {
        const double h = 5e-9;
        s.B = detail::total_field(g, r, model);
        s.Bmag = std::sqrt(s.B[0] * s.B[0] + s.B[1] * s.B[1] + s.B[2] * s.B[2]);
        for (int ax = 0; ax < 3; ++ax) {
            Vec3 rp = r, rm = r;
            rp[ax] += h;
            rm[ax] -= h;
            s.grad_Bmag[ax] = (detail::bmag(g, rp, model) - detail::bmag(g, rm, model)) / (2.0 * h);
        }
        Vec3 rp = r, rm = r;
        rp[2] += h;
        rm[2] -= h;
        s.d2Bmag_dz2 =
            (detail::bmag(g, rp, model) - 2.0 * s.Bmag + detail::bmag(g, rm, model)) / (h * h);
    }
    return s;
}

/// Zeeman potential of |F=2, mF> in the total field (J).
inline double zeeman_potential(const ChipGeometry& g, const Vec3& r, int mF, FieldModel model) {
    return mF * kConst.lande_gF * kConst.mu_bohr * field_at(g, r, model).Bmag;
}

/// Chip-only potential of the paper-style 1D model (no bias):
/// V = mF gF muB |By_chip(z)| on the symmetry axis; sign convention keeps the
/// analytic form (alpha/z)(1 - 2/(1 + (zq/z)^2)) which is positive below the
/// quadrupole point and negative beyond it.
inline double zeeman_potential_chip_only(const ChipGeometry& g, double z, int mF) {
    const double c = kConst.mu0 * g.current / (2.0 * M_PI);
    const double s = g.wire_spacing;
    const double by = (c / z) * (s * s - z * z) / (s * s + z * z);  // = -By_chip
    return mF * kConst.lande_gF * kConst.mu_bohr * by;
}

/// z position of the chip-field zero (quadrupole center) on the symmetry
/// axis. Bisection on the signed chip-only By over [10, 300] um, tol 1e-9 m.
inline double quadrupole_center(const ChipGeometry& g, FieldModel model) {
    auto by_chip = [&](double z) {
        const Vec3 r{0.0, 0.0, z};
        return (model == FieldModel::ThinWire) ? detail::thin_chip_field(g, r).B[1]
                                               : detail::finite_chip_field(g, r)[1];
    };
    double lo = 10 * units::um, hi = 300 * units::um;
    double flo = by_chip(lo), fhi = by_chip(hi);
    if (flo * fhi > 0.0) throw std::runtime_error("quadrupole_center: no sign change in bracket");
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        const double fm = by_chip(mid);
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

/// Differential momentum-kick rate kappa = gF muB |d|B|/dz| / hbar between
/// adjacent mF states, evaluated on the symmetry axis (1/(m s)).
inline double differential_kick_rate(const ChipGeometry& g, double z, FieldModel model) {
    const auto s = field_at(g, {0.0, 0.0, z}, model);
    return kConst.lande_gF * kConst.mu_bohr * std::abs(s.grad_Bmag[2]) / kConst.hbar;
}

/// Same rate computed from the chip-only 1D model used by the quantum solver.
inline double differential_kick_rate_chip_only(const ChipGeometry& g, double z) {
    const double h = 1e-10;
    return std::abs(zeeman_potential_chip_only(g, z + h, 1) -
                    zeeman_potential_chip_only(g, z - h, 1)) /
           (2.0 * h * kConst.hbar);
}

}  // namespace sgi
