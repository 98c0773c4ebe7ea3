#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "sgi/constants.hpp"
#include "sgi/numerics.hpp"

namespace sgi {

/// One Gaussian component of a superposition:
/// g(z) = (2 pi sigma^2)^(-1/4) exp(-(z-z0)^2/4 sigma^2 + i p0 (z-z0)/hbar),
/// weighted by the complex coefficient c.
struct GaussianComponent {
    double z0 = 0.0;
    double p0 = 0.0;
    double sigma = 1e-6;
    std::complex<double> c{1.0, 0.0};
};

struct WignerMap {
    int nz = 0, np = 0;
    double z_min = 0.0, dz = 0.0;
    double p_min = 0.0, dp = 0.0;
    std::vector<double> w;  // row-major, w[iz * np + ip]

    double at(int iz, int ip) const { return w[static_cast<std::size_t>(iz) * np + ip]; }
};

/// Analytic Wigner function of a superposition of Gaussian wavepackets,
/// W(z,p) = (1/pi hbar) sum_ij c_i c_j^* Integral g_j^*(z+y) g_i(z-y) e^{2ipy/hbar} dy,
/// each term a closed-form complex Gaussian integral. Throws if the requested
/// map exceeds 4e6 cells.
inline WignerMap wigner_map(const std::vector<GaussianComponent>& comps, double z_min,
                            double z_max, int nz, double p_min, double p_max, int np) {
    if (static_cast<long long>(nz) * np > 4000000LL)
        throw std::invalid_argument("wigner_map: more than 4e6 cells requested");
    if (nz < 2 || np < 2) throw std::invalid_argument("wigner_map: need at least a 2x2 map");
    const double hbar = kConst.hbar;
    WignerMap m;
    m.nz = nz;
    m.np = np;
    m.z_min = z_min;
    m.dz = (z_max - z_min) / (nz - 1);
    m.p_min = p_min;
    m.dp = (p_max - p_min) / (np - 1);
    m.w.assign(static_cast<std::size_t>(nz) * np, 0.0);

    for (int iz = 0; iz < nz; ++iz) {
        const double z = z_min + iz * m.dz;
        for (int ip = 0; ip < np; ++ip) {
            const double p = p_min + ip * m.dp;
            std::complex<double> sum(0.0, 0.0);
            for (const auto& gi : comps) {
                for (const auto& gj : comps) {
                    if (gi.sigma != gj.sigma)
                        throw std::invalid_argument("wigner_map: components must share sigma");
                    const double s2 = gi.sigma * gi.sigma;
                    const double ui = z - gi.z0, uj = z - gj.z0;
                    const std::complex<double> a(1.0 / (2.0 * s2), 0.0);
                    const std::complex<double> b((ui - uj) / (2.0 * s2),
                                                 (2.0 * p - gi.p0 - gj.p0) / hbar);
                    const std::complex<double> c(-(ui * ui + uj * uj) / (4.0 * s2),
                                                 (gi.p0 * ui - gj.p0 * uj) / hbar);
                    const double n2 = 1.0 / std::sqrt(2.0 * M_PI * s2);
                    sum += gi.c * std::conj(gj.c) * n2 * gaussian_integral(a, b, c);
                }
            }
            m.w[static_cast<std::size_t>(iz) * np + ip] = sum.real() / (M_PI * hbar);
        }
    }
    return m;
}

/// Position marginal Integral W dp by the trapezoid rule (for validation).
inline std::vector<double> wigner_position_marginal(const WignerMap& m) {
    std::vector<double> out(m.nz, 0.0);
    for (int iz = 0; iz < m.nz; ++iz) {
        double s = 0.5 * (m.at(iz, 0) + m.at(iz, m.np - 1));
        for (int ip = 1; ip < m.np - 1; ++ip) s += m.at(iz, ip);
        out[iz] = s * m.dp;
    }
    return out;
}

}  // namespace sgi
