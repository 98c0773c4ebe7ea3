#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgi/hd_theory.hpp"
#include "sgi/numerics.hpp"

using namespace sgi;

namespace {

/// Oracle: normalized Fourier transform of the 3D TF z-marginal, which is
/// proportional to (1 - z^2)^2 on [-1, 1].
double tf_momentum_quadrature(double xi) {
    static const GaussLegendre gl(400);
    const double num = gl.integrate(
        [xi](double z) { return std::pow(1.0 - z * z, 2) * std::cos(xi * z); }, -1.0, 1.0);
    const double den = 16.0 / 15.0;  // integral of (1-z^2)^2
    return num / den;
}

/// Oracle: |<psi | exp(i dp z / hbar) exp(-i dz p / hbar) | psi>| for a
/// minimal Gaussian, evaluated by quadrature.
double gaussian_overlap_quadrature(double sigma_z, double dz, double dp) {
    static const GaussLegendre gl(300);
    const double hbar = kConst.hbar;
    double re = 0.0, im = 0.0;
    const double span = 10.0 * sigma_z + std::abs(dz);
    auto rho = [&](double z) {
        const double a = std::exp(-z * z / (4.0 * sigma_z * sigma_z));
        const double b = std::exp(-(z - dz) * (z - dz) / (4.0 * sigma_z * sigma_z));
        return a * b / std::sqrt(2.0 * M_PI * sigma_z * sigma_z);
    };
    re = gl.integrate([&](double z) { return rho(z) * std::cos(dp * z / hbar); }, -span, span);
    im = gl.integrate([&](double z) { return rho(z) * std::sin(dp * z / hbar); }, -span, span);
    return std::sqrt(re * re + im * im);
}

}  // namespace

TEST_CASE("TF momentum law matches the quadrature oracle to 1e-8") {
    for (double xi = 0.0; xi <= 20.0; xi += 0.37)
        CHECK(std::abs(hd::visibility_tf_momentum_xi(xi) - tf_momentum_quadrature(xi)) < 1e-8);
}

TEST_CASE("TF momentum small-xi series joins smoothly") {
    // both branches evaluated at the same point just below the switch
    const double xi = 1e-1 * 0.999;
    const double series = hd::visibility_tf_momentum_xi(xi);
    const double closed =
        15.0 / std::pow(xi, 5) * (3.0 * std::sin(xi) - xi * xi * std::sin(xi) - 3.0 * xi * std::cos(xi));
    CHECK(std::abs(series - closed) < 1e-9);
    CHECK(hd::visibility_tf_momentum_xi(0.0) == doctest::Approx(1.0));
    CHECK(hd::visibility_tf_momentum_xi(1e-3) ==
          doctest::Approx(1.0 - 1e-6 / 14.0).epsilon(1e-12));
}

TEST_CASE("Gaussian law matches the displacement-operator quadrature") {
    const double sigma = 1.2 * units::um;
    const double sp = kConst.hbar / (2.0 * sigma);  // minimal state
    for (double x = 0.0; x <= 3.0; x += 0.3) {
        const double dz = x * sigma;
        const double dp = 0.7 * x * kConst.hbar / sigma;
        const double v = hd::visibility_gaussian(sigma, sp, dz, dp);
        CHECK(std::abs(v - gaussian_overlap_quadrature(sigma, dz, dp)) < 1e-8);
    }
}

TEST_CASE("TF position law width against the numeric 3D overlap") {
    // numeric overlap of two displaced TF wavefunctions sqrt(1 - r^2):
    // V(d) = (15/8) Int dz Int_0^{min(a,b)} du sqrt((a-u)(b-u)),
    // a = 1 - z^2, b = 1 - (z - d)^2
    static const GaussLegendre gl(160);
    auto overlap3d = [&](double d) {
        auto inner = [&](double z) {
            const double a = 1.0 - z * z;
            const double b = 1.0 - (z - d) * (z - d);
            const double m = std::min(a, b);
            if (m <= 0.0) return 0.0;
            return gl.integrate([&](double u) { return std::sqrt((a - u) * (b - u)); }, 0.0, m);
        };
        const double lo = std::max(-1.0, d - 1.0), hi = 1.0;
        return 15.0 / 8.0 * gl.integrate(inner, lo, hi);
    };
    CHECK(overlap3d(0.0) == doctest::Approx(1.0).epsilon(1e-9));

    // least-squares Gaussian width over the V >= 0.1 range
    std::vector<double> ds, vs;
    for (double d = 0.02; d < 1.4; d += 0.02) {
        const double v = overlap3d(d);
        if (v >= 0.1) {
            ds.push_back(d);
            vs.push_back(v);
        }
    }
    auto sse = [&](double s) {
        double e = 0.0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const double f = std::exp(-ds[i] * ds[i] / (2.0 * s * s));
            e += (f - vs[i]) * (f - vs[i]);
        }
        return e;
    };
    double a = 0.4, b = 0.9;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = sse(c1), f2 = sse(c2);
    while (b - a > 1e-7) {
        if (f1 < f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = sse(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = sse(c2);
        }
    }
    const double width = 0.5 * (a + b);
    CHECK(width == doctest::Approx(hd::kTfSigmaFactor).epsilon(0.005));
}

TEST_CASE("Gaussian surrogate of the TF momentum law: documented accuracy") {
    // near-perfect overlap region: few-percent agreement; the published
    // 0.41 z_max width overestimates the decay slightly at larger xi
    const double zmax = 2.88 * units::um;
    for (double xi = 0.0; xi <= 1.0; xi += 0.2) {
        const double dp = xi * kConst.hbar / zmax;
        CHECK(std::abs(hd::visibility_tf_momentum_gaussian(dp, zmax) -
                       hd::visibility_tf_momentum_xi(xi)) < 0.02);
    }
    const double dp2 = 2.0 * kConst.hbar / zmax;
    CHECK(std::abs(hd::visibility_tf_momentum_gaussian(dp2, zmax) -
                   hd::visibility_tf_momentum_xi(2.0)) < 0.05);
}

TEST_CASE("BEC sizing and ballistic expansion") {
    const double fz = 127.0, fx = 38.0;
    const auto b = hd::bec_size(1e4, 2.0 * M_PI * fx, 2.0 * M_PI * fz, 2.0 * M_PI * fz,
                                2.0 * M_PI * fz);
    CHECK(b.w0 / units::um == doctest::Approx(2.88).epsilon(0.01));
    CHECK(b.mu > 0.0);
    const double w4 = hd::tf_expansion(b.w0, 2.0 * M_PI * fz, 4.0 * units::ms);
    CHECK(w4 / units::um == doctest::Approx(10.0).epsilon(0.05));
    CHECK(hd::tf_expansion(b.w0, 2.0 * M_PI * fz, 0.0) == doctest::Approx(b.w0));
}
