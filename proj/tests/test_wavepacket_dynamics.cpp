#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "sgi/numerics.hpp"
#include "sgi/rng.hpp"
#include "sgi/wavepacket_dynamics.hpp"

using namespace sgi;

namespace {

Environment harmonic_env(double omega, double mass = kConst.mass_rb87) {
    return [omega, mass](const Vec3& r, double) {
        EnvSample e;
        for (int j = 0; j < 3; ++j) {
            e.omega_sq[j] = omega * omega;
            e.force[j] = -mass * omega * omega * r[j];
            e.potential += 0.5 * mass * omega * omega * r[j] * r[j];
        }
        return e;
    };
}

/// Numeric overlap oracle: trapezoid integral of conj(psi1) psi2 for the
/// scaled-Gaussian parametrization used by overlap_general.
std::complex<double> overlap_quadrature(double l1, double l1d, double l2, double l2d,
                                        double sigma0, double dz, double dp) {
    const double hbar = kConst.hbar, m = kConst.mass_rb87;
    const double smax = sigma0 * std::max(l1, l2);
    const int n = 40000;
    const double lo = -12.0 * smax + std::min(0.0, dz), hi = 12.0 * smax + std::max(0.0, dz);
    const double h = (hi - lo) / (n - 1);
    auto psi = [&](double z, double l, double ld, double zc, double p) {
        const double u = z - zc;
        const std::complex<double> ex(-u * u / (4.0 * sigma0 * sigma0 * l * l),
                                      m * ld * u * u / (2.0 * hbar * l) + p * u / hbar);
        return std::pow(2.0 * M_PI * sigma0 * sigma0 * l * l, -0.25) * std::exp(ex);
    };
    std::complex<double> s(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const double z = lo + i * h;
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        s += w * std::conj(psi(z, l1, l1d, 0.0, 0.0)) * psi(z, l2, l2d, dz, dp);
    }
    return s * h;
}

}  // namespace

TEST_CASE("velocity Verlet conserves energy in a static harmonic trap") {
    const double omega = 2.0 * M_PI * 850.0;
    WavepacketState s;
    s.r = {0.3 * units::um, -0.2 * units::um, 0.8 * units::um};
    s.v = {0.0, 1e-3, -2e-3};
    const double e0 = 0.5 * kConst.mass_rb87 *
                          (s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2]) +
                      harmonic_env(omega)(s.r, 0.0).potential;
    propagate(s, harmonic_env(omega), 0.0, 2e-3, 1e-8);
    const double e1 = 0.5 * kConst.mass_rb87 *
                          (s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2]) +
                      harmonic_env(omega)(s.r, 0.0).potential;
    CHECK(std::abs(e1 - e0) / e0 < 1e-6);
}

TEST_CASE("center tracks the classical harmonic trajectory") {
    const double omega = 2.0 * M_PI * 850.0;
    WavepacketState s;
    s.r = {0.0, 0.0, 1.0 * units::um};
    propagate(s, harmonic_env(omega), 0.0, 1.5e-3, 1e-8);
    CHECK(s.r[2] == doctest::Approx(1.0 * units::um * std::cos(omega * 1.5e-3)).epsilon(1e-4));
}

TEST_CASE("Gaussian scale factor reproduces free spreading exactly") {
    WavepacketState s;
    s.sigma0 = {0.3 * units::um, 0.3 * units::um, 0.3 * units::um};
    Environment free_env = [](const Vec3&, double) { return EnvSample{}; };
    const double t = 2e-3;
    propagate(s, free_env, 0.0, t, 1e-6);
    const double a = kConst.hbar / (2.0 * kConst.mass_rb87 * s.sigma0[2] * s.sigma0[2]);
    CHECK(s.lambda[2] == doctest::Approx(std::sqrt(1.0 + a * a * t * t)).epsilon(1e-8));
    CHECK(s.lambda_dot[2] ==
          doctest::Approx(a * a * t / std::sqrt(1.0 + a * a * t * t)).epsilon(1e-8));
}

TEST_CASE("Thomas-Fermi scale equation conserves its energy integral") {
    // isotropic release: lambda'' = w0^2 / lambda^4 has the integral
    // lambda'^2 = (2/3) w0^2 (1 - lambda^-3)
    WavepacketState s;
    s.mode = PacketMode::ThomasFermi;
    const double w0 = 2.0 * M_PI * 127.0;
    s.omega0_sq = {w0 * w0, w0 * w0, w0 * w0};
    Environment free_env = [](const Vec3&, double) { return EnvSample{}; };
    propagate(s, free_env, 0.0, 4e-3, 1e-7);
    const double lhs = s.lambda_dot[2] * s.lambda_dot[2];
    const double rhs = (2.0 / 3.0) * w0 * w0 * (1.0 - std::pow(s.lambda[2], -3.0));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("scale factor collapse raises") {
    WavepacketState s;
    s.sigma0 = {50 * units::um, 50 * units::um, 50 * units::um};  // negligible quantum pressure
    const double omega = 2.0 * M_PI * 850.0;
    CHECK_THROWS(propagate(s, harmonic_env(omega), 0.0, 1e-3, 1e-7));
}

TEST_CASE("overlap_general matches numeric quadrature") {
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const double sigma0 = (0.3 + rng.uniform()) * units::um;
        const double l1 = 0.5 + 2.0 * rng.uniform(), l2 = 0.5 + 2.0 * rng.uniform();
        const double l1d = 2e3 * rng.uniform_pm1(), l2d = 2e3 * rng.uniform_pm1();
        const double dz = 2.0 * sigma0 * rng.uniform_pm1();
        const double dp = 2.0 * kConst.hbar / sigma0 * rng.uniform_pm1();
        const auto a = overlap_general(l1, l1d, l2, l2d, sigma0, dz, dp);
        const auto b = overlap_quadrature(l1, l1d, l2, l2d, sigma0, dz, dp);
        CHECK(std::abs(a - b) < 1e-8);
    }
    CHECK(std::abs(overlap_general(1.3, 40.0, 1.3, 40.0, 0.8e-6, 0.0, 0.0) -
                   std::complex<double>(1.0, 0.0)) < 1e-12);
}

TEST_CASE("overlap_projected equals overlap_general for equal scales") {
    CounterRng rng(12, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const double sigma0 = (0.2 + rng.uniform()) * units::um;
        const double l = 0.5 + 2.5 * rng.uniform();
        const double ld = 3e3 * rng.uniform_pm1();
        const double dz = 1.5 * sigma0 * l * rng.uniform_pm1();
        const double dp = 1.5 * kConst.hbar / (sigma0 * l) * rng.uniform_pm1();
        const double v_gen = std::abs(overlap_general(l, ld, l, ld, sigma0, dz, dp));
        const double sigma = sigma0 * l;
        const double xi = kConst.mass_rb87 * ld / (kConst.hbar * l);  // m lambda_dot / hbar lambda
        const auto pr = overlap_projected(sigma, xi, dz, dp);
        CHECK(std::abs(v_gen - pr.visibility) < 1e-10);
    }
}

TEST_CASE("overlap magnitude is invariant under shared free propagation") {
    Environment free_env = [](const Vec3&, double) { return EnvSample{}; };
    WavepacketState a, b;
    a.sigma0 = b.sigma0 = {0.5 * units::um, 0.5 * units::um, 0.5 * units::um};
    b.r[2] = 0.4 * units::um;
    b.v[2] = 3e-4;
    const double v0 = std::abs(overlap_general(
        a.lambda[2], a.lambda_dot[2], b.lambda[2], b.lambda_dot[2], a.sigma0[2],
        b.r[2] - a.r[2], kConst.mass_rb87 * (b.v[2] - a.v[2])));
    propagate(a, free_env, 0.0, 1.2e-3, 1e-6);
    propagate(b, free_env, 0.0, 1.2e-3, 1e-6);
    const double v1 = std::abs(overlap_general(
        a.lambda[2], a.lambda_dot[2], b.lambda[2], b.lambda_dot[2], a.sigma0[2],
        b.r[2] - a.r[2], kConst.mass_rb87 * (b.v[2] - a.v[2])));
    CHECK(std::abs(v1 - v0) < 1e-6);
}

TEST_CASE("full loop closes exactly for the symmetric uniform-gradient sequence") {
    FullLoopSequence seq;
    seq.t1 = seq.t4 = 6 * units::us;
    seq.t2 = seq.t3 = 6 * units::us;
    seq.td1 = seq.td2 = 300 * units::us;
    const double f1 = 1e-22;
    for (LoopScheme scheme : {LoopScheme::SpinInversion, LoopScheme::CurrentInversion}) {
        seq.scheme = scheme;
        auto env = [&](bool high) {
            return make_uniform_gradient_environment(f1, full_loop_windows(seq, high));
        };
        WavepacketState init;
        init.r = {0.0, 0.0, 95 * units::um};
        const auto r = run_full_loop(seq, env, init);
        CHECK(r.visibility > 0.9999);
        CHECK(std::abs(r.branch_hi.r[2] - r.branch_lo.r[2]) < 1e-12);
        CHECK(std::abs(r.branch_hi.v[2] - r.branch_lo.v[2]) < 1e-9);
    }
}
