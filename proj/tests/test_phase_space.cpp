#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgi/phase_space.hpp"
#include "sgi/sequencer.hpp"

using namespace sgi;
using namespace sgi::phase_space;

namespace {
constexpr double kOmega = 2.0 * M_PI * 850.0;
}

TEST_CASE("rotation matrices compose and preserve length") {
    const auto a = rotation(kOmega, 37e-6);
    const auto b = rotation(kOmega, 81e-6);
    const auto ab = multiply(a, b);
    const auto c = rotation(kOmega, 118e-6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(ab[i][j] == doctest::Approx(c[i][j]).epsilon(1e-12));
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    CHECK(det == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("optimal stop rotates a sheared kick onto the position axis") {
    for (double td_us : {90.0, 130.0, 300.0, 600.0}) {
        const double td = td_us * 1e-6;
        const double t2 = optimal_stop_time(kOmega, td);
        // unit momentum kick, sheared by the delay, rotated by the stop
        const auto m = multiply(rotation(kOmega, t2), shear(kOmega, td));
        const double zf = m[0][1], pf = m[1][1];
        CHECK(std::abs(pf) < 1e-12);  // momentum nulled
        CHECK(zf == doctest::Approx(squeeze_factor(kOmega, td)).epsilon(1e-12));
    }
}

TEST_CASE("stopping times for the documented delays") {
    CHECK(optimal_stop_time(kOmega, 124e-6) / 1e-6 == doctest::Approx(185.0).epsilon(0.006));
    CHECK(optimal_stop_time(kOmega, 174e-6) / 1e-6 == doctest::Approx(154.0).epsilon(0.006));
    CHECK(optimal_stop_time(kOmega, 224e-6) / 1e-6 == doctest::Approx(130.0).epsilon(0.006));
}

TEST_CASE("squeeze factors of the working-point table") {
    for (const auto& row : half_loop_table())
        CHECK(std::abs(squeeze_factor(kOmega, row.td_us * 1e-6) - row.xi) < 0.01);
}

TEST_CASE("separation and far-field fringe parameters") {
    const double kappa = 0.86e12;
    const double m = kConst.mass_rb87;
    for (const auto& row : half_loop_table()) {
        const double k = kappa * row.t1_us * 1e-6;
        const double d = separation_after_stop(k, kOmega, row.td_us * 1e-6, m);
        CHECK(d / units::um == doctest::Approx(row.calc_d_um).epsilon(0.05));
    }
    // largest-separation point: lambda = 2 pi hbar tof / (m d) ~ 25 um
    const auto& last = half_loop_table().back();
    const auto ff = farfield_fringes(kappa * last.t1_us * 1e-6, 1.2 * units::um, kOmega,
                                     last.td_us * 1e-6, m, last.tof_us * 1e-6);
    const double lambda_expected =
        2.0 * M_PI * kConst.hbar * last.tof_us * 1e-6 / (m * last.exp_d_um * units::um);
    CHECK(ff.wavelength == doctest::Approx(lambda_expected).epsilon(0.05));
}

TEST_CASE("focus width scales inversely with the initial width") {
    const double m = kConst.mass_rb87;
    const double w1 = focus_width(1.2 * units::um, kOmega, 116e-6, m);
    const double w2 = focus_width(2.4 * units::um, kOmega, 116e-6, m);
    CHECK(w1 == doctest::Approx(2.0 * w2).epsilon(1e-12));
    // number of fringes is conserved: k sigma / pi
    const auto ff = farfield_fringes(0.86e12 * 4e-6, 1.53 * units::um, kOmega, 116e-6, m, 6760e-6);
    CHECK(ff.n_fringes == doctest::Approx(0.86e12 * 4e-6 * 1.53e-6 / M_PI).epsilon(1e-12));
}
