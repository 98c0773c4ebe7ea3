#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "sgi/wigner.hpp"

using namespace sgi;

namespace {

double psi_density(const std::vector<GaussianComponent>& comps, double z) {
    std::complex<double> s(0.0, 0.0);
    for (const auto& g : comps) {
        const double u = z - g.z0;
        s += g.c * std::pow(2.0 * M_PI * g.sigma * g.sigma, -0.25) *
             std::exp(std::complex<double>(-u * u / (4.0 * g.sigma * g.sigma),
                                           g.p0 * u / kConst.hbar));
    }
    return std::norm(s);
}

}  // namespace

TEST_CASE("single Gaussian Wigner map: positive, normalized, correct marginal") {
    const double sigma = 0.12e-6;
    std::vector<GaussianComponent> comps{{0.0, 0.0, sigma, {1.0, 0.0}}};
    const double pw = kConst.hbar / (2.0 * sigma);
    const auto m = wigner_map(comps, -6 * sigma, 6 * sigma, 161, -6 * pw, 6 * pw, 161);
    double wmin = 1e300, total = 0.0;
    for (double v : m.w) wmin = std::min(wmin, v);
    CHECK(wmin > -1e-12 / (M_PI * kConst.hbar));
    const auto marg = wigner_position_marginal(m);
    const double peak = psi_density(comps, 0.0);
    for (int iz = 0; iz < m.nz; iz += 8) {
        const double z = m.z_min + iz * m.dz;
        CHECK(std::abs(marg[iz] - psi_density(comps, z)) < 1e-6 * peak);
    }
    for (int iz = 0; iz < m.nz; ++iz) total += marg[iz] * m.dz;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("split packet: interference fringes at midpoint, correct marginal") {
    const double sigma = 0.12e-6, d = 0.55e-6;
    const double inv = 1.0 / std::sqrt(2.0);
    std::vector<GaussianComponent> comps{{-0.5 * d, 0.0, sigma, {inv, 0.0}},
                                         {+0.5 * d, 0.0, sigma, {inv, 0.0}}};
    const double pw = kConst.hbar / (2.0 * sigma);
    const auto m = wigner_map(comps, -0.5 * d - 5 * sigma, 0.5 * d + 5 * sigma, 201, -5 * pw,
                              5 * pw, 201);
    // the midpoint column oscillates in p with period 2 pi hbar / d and
    // reaches negative values (nonclassical)
    const int iz_mid = (m.nz - 1) / 2;
    double col_min = 1e300, col_max = -1e300;
    for (int ip = 0; ip < m.np; ++ip) {
        col_min = std::min(col_min, m.at(iz_mid, ip));
        col_max = std::max(col_max, m.at(iz_mid, ip));
    }
    CHECK(col_min < -0.1 * col_max);
    const auto marg = wigner_position_marginal(m);
    const double peak = psi_density(comps, -0.5 * d);
    for (int iz = 0; iz < m.nz; iz += 10) {
        const double z = m.z_min + iz * m.dz;
        CHECK(std::abs(marg[iz] - psi_density(comps, z)) < 1e-4 * peak);
    }
}

TEST_CASE("map size limit") {
    std::vector<GaussianComponent> comps{{0.0, 0.0, 1e-7, {1.0, 0.0}}};
    CHECK_THROWS(wigner_map(comps, -1e-6, 1e-6, 2001, -1e-27, 1e-27, 2001));
    CHECK_THROWS(wigner_map(comps, -1e-6, 1e-6, 1, -1e-27, 1e-27, 10));
}
