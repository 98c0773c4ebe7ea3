#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "sgi/numerics.hpp"

namespace sgi {
namespace fringe {

struct FringeFit {
    double amplitude = 0.0;
    double center = 0.0;      // envelope center
    double sigma = 0.0;       // envelope width
    double visibility = 0.0;  // clamped to [0, 1]
    double visibility_raw = 0.0;
    double k = 0.0;           // rad/m
    double phase = 0.0;       // at the grid center
    double offset = 0.0;
    double chirp = 0.0;       // rad/m^2 (chirped variant only)
    double visibility_err = 0.0;
    double phase_err = 0.0;
    double k_err = 0.0;
    double r_squared = 0.0;
    bool converged = false;
};

struct FftVisibility {
    double visibility = 0.0;
    double k_peak = 0.0;      // rad/m
    int peak_bin = 0;
    double noise_floor = 0.0;
};

/// Fourier visibility estimator: ratio of the oscillatory peak amplitude
/// (summed over a +-2 bin window at +-k0) to the zero-frequency amplitude
/// (same window). Uses |FFT| per bin, so the estimate is translation
/// invariant. Throws when no peak stands >= 3x above the noise floor.
inline FftVisibility fft_visibility(const std::vector<double>& density, double dz) {
    std::size_t npad = 1;
    while (npad < density.size()) npad <<= 1;
    std::vector<std::complex<double>> a(npad, 0.0);
    for (std::size_t i = 0; i < density.size(); ++i) a[i] = density[i];
    fft_pow2(a);
    const std::size_t half = npad / 2;
    std::vector<double> mag(half + 1);
    for (std::size_t i = 0; i <= half; ++i) mag[i] = std::abs(a[i]);

    // skip the zero-frequency lobe: scan until its magnitude has fallen below
    // 2 percent of A(0) or has reached a valley (the lobes can overlap when
    // only a few fringes fit under the envelope), then a small guard band
    std::size_t jmin = 1;
    while (jmin + 1 < half && mag[jmin] > 0.02 * mag[0] && mag[jmin] > mag[jmin + 1]) ++jmin;
    jmin = std::min(half, jmin + 1);

    std::size_t peak = jmin;
    for (std::size_t j = jmin; j <= half; ++j)
        if (mag[j] > mag[peak]) peak = j;

    std::vector<double> upper(mag.begin() + half / 2, mag.end());
    std::nth_element(upper.begin(), upper.begin() + upper.size() / 2, upper.end());
    const double floor_est = upper[upper.size() / 2];

    FftVisibility out;
    out.noise_floor = floor_est;
    // a monotone envelope tail maximizes at the guard-band edge; a genuine
    // fringe produces an interior local maximum
    const bool local_max =
        peak > 0 && peak < half && mag[peak] > mag[peak - 1] && mag[peak] > mag[peak + 1];
    if (!local_max || mag[peak] < 3.0 * floor_est)
        throw std::runtime_error("fft_visibility: no fringe peak above noise floor");

    auto window = [&](std::size_t c) {
        double s = 0.0;
        for (int j = -2; j <= 2; ++j) {
            const long idx = static_cast<long>(c) + j;
            if (idx >= 0 && idx <= static_cast<long>(half)) s += mag[idx];
        }
        return s;
    };
    double zero_win = mag[0];
    for (int j = 1; j <= 2; ++j) zero_win += 2.0 * mag[j];  // real signal: |A(-j)| = |A(j)|
    out.visibility = 2.0 * window(peak) / zero_win;
    out.peak_bin = static_cast<int>(peak);
    out.k_peak = 2.0 * M_PI * static_cast<double>(peak) / (static_cast<double>(npad) * dz);
    return out;
}

/// Gaussian-envelope sine fit:
///   n(z) = A exp(-(z-zc)^2 / 2 sigma^2) (1 + V sin(k (z-zr) + q (z-zr)^2 + phi)) + c
/// with zr fixed at the grid center. Initial values come from moments and the
/// FFT peak. Requires >= ~3 oscillations across the envelope.
inline FringeFit fit_fringe(const std::vector<double>& zs, const std::vector<double>& ys,
                            bool chirped = false) {
    if (zs.size() != ys.size() || zs.size() < 16)
        throw std::invalid_argument("fit_fringe: bad input size");
    const std::size_t n = zs.size();
    const double dz = zs[1] - zs[0];
    const double zr = zs[n / 2];

    const double c0 = *std::min_element(ys.begin(), ys.end());
    double wsum = 0.0, zc0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = ys[i] - c0;
        wsum += w;
        zc0 += w * zs[i];
    }
    zc0 /= wsum;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (ys[i] - c0) * (zs[i] - zc0) * (zs[i] - zc0);
    const double sig0 = std::sqrt(std::max(var / wsum, dz * dz));

    const FftVisibility fv = fft_visibility(ys, dz);
    const double k0 = fv.k_peak;
    if (k0 * 4.0 * sig0 / (2.0 * M_PI) < 3.0)
        throw std::runtime_error("fit_fringe: fewer than ~3 oscillations across the envelope");

    std::complex<double> s(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        s += (ys[i] - c0) * std::exp(std::complex<double>(0.0, -k0 * (zs[i] - zr)));
    const double phi0 = std::arg(s) + M_PI / 2.0;

    const double a0 = (*std::max_element(ys.begin(), ys.end()) - c0) /
                      (1.0 + std::min(0.99, fv.visibility));

    std::vector<double> p{a0, zc0, sig0, std::min(1.2, fv.visibility), k0, phi0, c0};
    if (chirped) p.push_back(0.0);

    auto model = [zr, chirped](double z, const std::vector<double>& q) {
        const double dzr = z - zr;
        double arg = q[4] * dzr + q[5];
        if (chirped) arg += q[7] * dzr * dzr;
        const double env = q[0] * std::exp(-(z - q[1]) * (z - q[1]) / (2.0 * q[2] * q[2]));
        return env * (1.0 + q[3] * std::sin(arg)) + q[6];
    };
    const LmResult r = lm_fit(zs, ys, model, p);

    FringeFit out;
    out.amplitude = r.params[0];
    out.center = r.params[1];
    out.sigma = std::abs(r.params[2]);
    out.visibility_raw = r.params[3];
    out.visibility = std::clamp(std::abs(r.params[3]), 0.0, 1.0);
    out.k = std::abs(r.params[4]);
    out.phase = std::remainder(r.params[5], 2.0 * M_PI);
    out.offset = r.params[6];
    if (chirped) out.chirp = r.params[7];
    out.visibility_err = r.errors[3];
    out.k_err = r.errors[4];
    out.phase_err = r.errors[5];
    out.r_squared = r.r_squared;
    out.converged = r.converged;
    return out;
}

struct RamseyFit {
    double contrast = 0.0;
    double contrast_err = 0.0;
    double phase = 0.0;
    double phase_err = 0.0;
    double offset = 0.0;
    double r_squared = 0.0;
};

/// Spin-population Ramsey fringe P(phi) = 0.5 C sin(phi + phi0) + c, solved
/// exactly as a linear least-squares problem in (C cos phi0, C sin phi0, c).
inline RamseyFit fit_ramsey(const std::vector<double>& phis, const std::vector<double>& pops) {
    const std::size_t n = phis.size();
    if (n < 4 || pops.size() != n) throw std::invalid_argument("fit_ramsey: bad input size");
    std::vector<std::vector<double>> JtJ(3, std::vector<double>(3, 0.0));
    std::vector<double> Jty(3, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double row[3]{std::sin(phis[i]), std::cos(phis[i]), 1.0};
        for (int a = 0; a < 3; ++a) {
            Jty[a] += row[a] * pops[i];
            for (int b = 0; b < 3; ++b) JtJ[a][b] += row[a] * row[b];
        }
    }
    const auto cov_raw = invert_matrix(JtJ);
    const auto ab = solve_linear(JtJ, Jty);
    const double a = ab[0], b = ab[1];
    const double r = std::sqrt(a * a + b * b);

    double ss = 0.0, mean = 0.0;
    for (double v : pops) mean += v;
    mean /= static_cast<double>(n);
    double tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = a * std::sin(phis[i]) + b * std::cos(phis[i]) + ab[2];
        ss += (pops[i] - f) * (pops[i] - f);
        tss += (pops[i] - mean) * (pops[i] - mean);
    }
    const double s2 = n > 3 ? ss / static_cast<double>(n - 3) : 0.0;

    RamseyFit out;
    out.contrast = 2.0 * r;
    out.phase = std::atan2(b, a);
    out.offset = ab[2];
    out.r_squared = tss > 0.0 ? 1.0 - ss / tss : 1.0;
    if (r > 0.0) {
        const double va = s2 * cov_raw[0][0], vb = s2 * cov_raw[1][1], cab = s2 * cov_raw[0][1];
        out.contrast_err =
            2.0 * std::sqrt(std::max(0.0, (a * a * va + b * b * vb + 2.0 * a * b * cab))) / r;
        out.phase_err =
            std::sqrt(std::max(0.0, (b * b * va + a * a * vb - 2.0 * a * b * cab))) / (r * r);
    }
    return out;
}

struct DecayFit {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;  // ln V = -(a1 t + a2 t^2 + a3 t^3)
};

/// Cubic log-visibility decay, constrained to V(0) = 1 (no intercept).
inline DecayFit fit_visibility_decay(const std::vector<double>& ts,
                                     const std::vector<double>& vs) {
    const std::size_t n = ts.size();
    if (n < 3 || vs.size() != n) throw std::invalid_argument("fit_visibility_decay: bad input");
    std::vector<std::vector<double>> JtJ(3, std::vector<double>(3, 0.0));
    std::vector<double> Jty(3, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (vs[i] <= 0.0) throw std::invalid_argument("fit_visibility_decay: nonpositive V");
        const double y = -std::log(vs[i]);
        const double row[3]{ts[i], ts[i] * ts[i], ts[i] * ts[i] * ts[i]};
        for (int a = 0; a < 3; ++a) {
            Jty[a] += row[a] * y;
            for (int b = 0; b < 3; ++b) JtJ[a][b] += row[a] * row[b];
        }
    }
    const auto x = solve_linear(JtJ, Jty);
    return DecayFit{x[0], x[1], x[2]};
}

struct EnvelopeSineFit {
    double amplitude = 0.0;
    double center = 0.0;  // envelope peak position
    double width = 0.0;
    double omega = 0.0;
    double phase = 0.0;
    double offset = 0.0;
    double r_squared = 0.0;
    bool converged = false;
};

/// y(t) = off + B exp(-(t-tc)^2 / 2 w^2) sin(Omega t + theta). Omega is
/// seeded by a periodogram scan of the residual around the mean.
inline EnvelopeSineFit fit_envelope_sine(const std::vector<double>& ts,
                                         const std::vector<double>& ys) {
    const std::size_t n = ts.size();
    if (n < 12 || ys.size() != n) throw std::invalid_argument("fit_envelope_sine: bad input");
    double off = 0.0;
    for (double v : ys) off += v;
    off /= static_cast<double>(n);

    double r2sum = 0.0, tc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - off;
        r2sum += r * r;
        tc += r * r * ts[i];
    }
    tc /= r2sum;
    double wvar = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        wvar += (ys[i] - off) * (ys[i] - off) * (ts[i] - tc) * (ts[i] - tc);
    const double w0 = std::sqrt(std::max(wvar / r2sum, (ts[1] - ts[0]) * (ts[1] - ts[0])));
    double bmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) bmax = std::max(bmax, std::abs(ys[i] - off));

    // periodogram scan for Omega
    const double span = ts.back() - ts.front();
    const double om_max = M_PI / (ts[1] - ts[0]);
    double best_om = 2.0 * M_PI / span, best_amp = -1.0, best_theta = 0.0;
    for (double om = 2.0 * M_PI / span; om < om_max; om += 0.25 * 2.0 * M_PI / span) {
        std::complex<double> s(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            s += (ys[i] - off) * std::exp(std::complex<double>(0.0, -om * ts[i]));
        if (std::abs(s) > best_amp) {
            best_amp = std::abs(s);
            best_om = om;
            best_theta = std::arg(s) + M_PI / 2.0;
        }
    }

    auto model = [](double t, const std::vector<double>& q) {
        return q[5] + q[0] * std::exp(-(t - q[1]) * (t - q[1]) / (2.0 * q[2] * q[2])) *
                          std::sin(q[3] * t + q[4]);
    };
    const LmResult r =
        lm_fit(ts, ys, model, {bmax, tc, w0, best_om, best_theta, off});

    EnvelopeSineFit out;
    out.amplitude = std::abs(r.params[0]);
    out.center = r.params[1];
    out.width = std::abs(r.params[2]);
    out.omega = std::abs(r.params[3]);
    out.phase = std::remainder(r.params[4], 2.0 * M_PI);
    out.offset = r.params[5];
    out.r_squared = r.r_squared;
    out.converged = r.converged;
    return out;
}

struct SqrtQuadraticFit {
    double a = 0.0;  // w^2 = a + b t^2
    double b = 0.0;
    double w0 = 0.0;          // sqrt(a)
    double expansion_rate = 0.0;  // sqrt(b), asymptotic dw/dt
};

/// Ballistic-expansion width law w(t) = sqrt(a + b t^2), linear in (a, b).
inline SqrtQuadraticFit fit_sqrt_quadratic(const std::vector<double>& ts,
                                           const std::vector<double>& ws) {
    const std::size_t n = ts.size();
    if (n < 2 || ws.size() != n) throw std::invalid_argument("fit_sqrt_quadratic: bad input");
    std::vector<std::vector<double>> JtJ(2, std::vector<double>(2, 0.0));
    std::vector<double> Jty(2, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double row[2]{1.0, ts[i] * ts[i]};
        const double y = ws[i] * ws[i];
        for (int a = 0; a < 2; ++a) {
            Jty[a] += row[a] * y;
            for (int b = 0; b < 2; ++b) JtJ[a][b] += row[a] * row[b];
        }
    }
    const auto x = solve_linear(JtJ, Jty);
    SqrtQuadraticFit out;
    out.a = x[0];
    out.b = x[1];
    out.w0 = std::sqrt(std::max(0.0, x[0]));
    out.expansion_rate = std::sqrt(std::max(0.0, x[1]));
    return out;
}

}  // namespace fringe
}  // namespace sgi
