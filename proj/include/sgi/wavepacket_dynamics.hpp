#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sgi/constants.hpp"
#include "sgi/field_model.hpp"
#include "sgi/numerics.hpp"

namespace sgi {

enum class PacketMode { Gaussian, ThomasFermi };

/// Semiclassical wavepacket: classical center (r, v), accumulated action
/// phase, and per-axis scale factors for the internal width dynamics.
struct WavepacketState {
    Vec3 r{};
    Vec3 v{};
    double action = 0.0;  // integral of (m v^2 / 2 - V) dt, J s
    PacketMode mode = PacketMode::Gaussian;
    Vec3 sigma0{1.2 * units::um, 1.2 * units::um, 1.2 * units::um};  // width (or TF radius)
    Vec3 lambda{1.0, 1.0, 1.0};
    Vec3 lambda_dot{0.0, 0.0, 0.0};
    Vec3 omega0_sq{};  // trap curvature at release, used by the TF scale equation

    double width(int axis) const { return sigma0[axis] * lambda[axis]; }
};

struct EnvSample {
    double potential = 0.0;  // J
    Vec3 force{};            // N
    Vec3 omega_sq{};         // potential curvature / m, per axis (1/s^2)
};

/// Potential environment seen by one interferometer branch (time-dependent:
/// pulse windows, spin flips, current reversals are captured inside).
using Environment = std::function<EnvSample(const Vec3& r, double t)>;

namespace detail {

inline void scale_rhs(const WavepacketState& s, const Vec3& lambda, const Vec3& lambda_dot,
                      const Vec3& omega_sq, Vec3& dl, Vec3& dld, double mass) {
    const double prod = lambda[0] * lambda[1] * lambda[2];
    for (int j = 0; j < 3; ++j) {
        dl[j] = lambda_dot[j];
        if (s.mode == PacketMode::ThomasFermi) {
            dld[j] = s.omega0_sq[j] / (lambda[j] * prod) - omega_sq[j] * lambda[j];
        } else {
            const double a = kConst.hbar / (2.0 * mass * s.sigma0[j] * s.sigma0[j]);
            dld[j] = a * a / (lambda[j] * lambda[j] * lambda[j]) - omega_sq[j] * lambda[j];
        }
    }
}

}  // namespace detail

/// Velocity-Verlet for the center, RK4 for the scale factors (curvature
/// sampled at the instantaneous center), trapezoid rule for the action.
inline void propagate(WavepacketState& s, const Environment& env, double t0, double t1, double dt,
                      double mass = kConst.mass_rb87) {
    if (t1 <= t0) return;
    const int nsteps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9)));
    const double h = (t1 - t0) / nsteps;
    EnvSample e0 = env(s.r, t0);
    double t = t0;
    for (int step = 0; step < nsteps; ++step) {
        const double lag0 = 0.5 * mass * (s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2]) -
                            e0.potential;
        Vec3 r_new, v_half;
        for (int j = 0; j < 3; ++j) {
            v_half[j] = s.v[j] + 0.5 * h * e0.force[j] / mass;
            r_new[j] = s.r[j] + h * v_half[j];
        }
        // keep the final sample strictly inside [t0, t1): a force that is
        // switched over half-open windows acts on the whole last step, so
        // sampling exactly at t1 would drop half its impulse
        const double t_next = (step + 1 == nsteps) ? t1 - 1e-6 * h : t + h;
        const EnvSample e1 = env(r_new, t_next);
        Vec3 v_new;
        for (int j = 0; j < 3; ++j) v_new[j] = v_half[j] + 0.5 * h * e1.force[j] / mass;

        // RK4 on (lambda, lambda_dot); curvature held at the window average
        Vec3 wsq;
        for (int j = 0; j < 3; ++j) wsq[j] = 0.5 * (e0.omega_sq[j] + e1.omega_sq[j]);
        Vec3 k1l, k1d, k2l, k2d, k3l, k3d, k4l, k4d, lt, ld;
        detail::scale_rhs(s, s.lambda, s.lambda_dot, wsq, k1l, k1d, mass);
        for (int j = 0; j < 3; ++j) {
            lt[j] = s.lambda[j] + 0.5 * h * k1l[j];
            ld[j] = s.lambda_dot[j] + 0.5 * h * k1d[j];
        }
        detail::scale_rhs(s, lt, ld, wsq, k2l, k2d, mass);
        for (int j = 0; j < 3; ++j) {
            lt[j] = s.lambda[j] + 0.5 * h * k2l[j];
            ld[j] = s.lambda_dot[j] + 0.5 * h * k2d[j];
        }
        detail::scale_rhs(s, lt, ld, wsq, k3l, k3d, mass);
        for (int j = 0; j < 3; ++j) {
            lt[j] = s.lambda[j] + h * k3l[j];
            ld[j] = s.lambda_dot[j] + h * k3d[j];
        }
        detail::scale_rhs(s, lt, ld, wsq, k4l, k4d, mass);
        for (int j = 0; j < 3; ++j) {
            s.lambda[j] += h / 6.0 * (k1l[j] + 2.0 * k2l[j] + 2.0 * k3l[j] + k4l[j]);
            s.lambda_dot[j] += h / 6.0 * (k1d[j] + 2.0 * k2d[j] + 2.0 * k3d[j] + k4d[j]);
            if (s.lambda[j] <= 0.0)
                throw std::runtime_error("propagate: scale factor collapsed through zero");
        }

        s.r = r_new;
        s.v = v_new;
        const double lag1 = 0.5 * mass * (s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2]) -
                            e1.potential;
        s.action += 0.5 * h * (lag0 + lag1);
        e0 = e1;
        t += h;
    }
}

/// Complex overlap <psi1|psi2> along one axis for two scaled Gaussians that
/// share the initial width sigma0 but differ in scale factor, chirp, center
/// and momentum. Action phases are NOT included (add exp(i dS / hbar)
/// separately). |overlap| is the recombination visibility contribution.
inline std::complex<double> overlap_general(double lambda1, double lambda1_dot, double lambda2,
                                            double lambda2_dot, double sigma0, double dz,
                                            double dp, double mass = kConst.mass_rb87) {
    using cd = std::complex<double>;
    const double hbar = kConst.hbar;
    const double A1 = 1.0 / (4.0 * sigma0 * sigma0 * lambda1 * lambda1);
    const double A2 = 1.0 / (4.0 * sigma0 * sigma0 * lambda2 * lambda2);
    const double C1 = mass * lambda1_dot / (2.0 * hbar * lambda1);
    const double C2 = mass * lambda2_dot / (2.0 * hbar * lambda2);
    // psi_i ~ (2 pi sigma0^2 lambda_i^2)^(-1/4) exp(-(A_i - i C_i)(z - Z_i)^2 + i P_i (z-Z_i)/hbar)
    // with Z2 - Z1 = dz, P2 - P1 = dp; integrate conj(psi1) psi2.
    const cd a = cd(A1 + A2, C1 - C2);
    const cd b = 2.0 * dz * cd(A2, -C2) + cd(0.0, dp / hbar);
    // momentum phase referenced to each packet center
    const cd c = -cd(A2, -C2) * dz * dz - cd(0.0, dp * dz / hbar);
    const double norm = std::pow(2.0 * M_PI * sigma0 * sigma0 * lambda1 * lambda1, -0.25) *
                        std::pow(2.0 * M_PI * sigma0 * sigma0 * lambda2 * lambda2, -0.25);
    return norm * gaussian_integral(a, b, c);
}

/// Projected form: a chirped Gaussian of width sigma and chirp xi (the
/// quadratic phase coefficient, 1/m^2) behaves like an unchirped packet of
/// width sigma0 displaced in time by t_eff.
struct ProjectedOverlap {
    double sigma0;  // equivalent unchirped width
    double t_eff;   // equivalent propagation time
    double visibility;
};

inline ProjectedOverlap overlap_projected(double sigma, double xi, double dz, double dp,
                                          double mass = kConst.mass_rb87) {
    const double hbar = kConst.hbar;
    const double s4 = sigma * sigma * sigma * sigma;
    ProjectedOverlap o;
    o.sigma0 = sigma / std::sqrt(1.0 + 4.0 * xi * xi * s4);
    o.t_eff = (4.0 * mass / hbar) * s4 * xi / (1.0 + 4.0 * s4 * xi * xi);
    const double dz0 = dz - o.t_eff * dp / mass;
    o.visibility = std::exp(-o.sigma0 * o.sigma0 * dp * dp / (2.0 * hbar * hbar)) *
                   std::exp(-dz0 * dz0 / (8.0 * o.sigma0 * o.sigma0));
    return o;
}

/// Quadratic-phase (chirp) coefficient of a propagated state along one axis,
/// psi ~ exp(i xi (z - Z)^2), xi = m lambda_dot / (2 hbar lambda) (1/m^2).
inline double chirp_of(const WavepacketState& s, int axis, double mass = kConst.mass_rb87) {
    return mass * s.lambda_dot[axis] / (2.0 * kConst.hbar * s.lambda[axis]);
}

enum class LoopScheme { SpinInversion, CurrentInversion };

/// Timing of the four-pulse (full-loop) sequence. Gradient sign is reversed
/// during T2 and T3, either by reversing the chip current or by swapping the
/// spin states with a pi pulse.
struct FullLoopSequence {
    double t1 = 6 * units::us;
    double td1 = 300 * units::us;
    double t2 = 6 * units::us;
    double t3 = 6 * units::us;
    double td2 = 300 * units::us;
    double t4 = 6 * units::us;
    LoopScheme scheme = LoopScheme::SpinInversion;
    double dt_pulse = 1e-8;
    double dt_free = 1e-6;
};

struct FullLoopResult {
    std::complex<double> overlap;  // includes the differential action phase
    double visibility = 0.0;       // |overlap| (z axis x transverse factors)
    double phase = 0.0;            // arg(overlap)
    WavepacketState branch_hi, branch_lo;
};

/// Branch field environment factory: piecewise pulse windows with per-window
/// mF and current sign, evaluated on the chip field (chip contribution only,
/// i.e. |B_total| - |B_bias|, so the homogeneous bias adds no differential
/// phase). Gravity acts along +z.
struct PulseWindow {
    double t0, t1;
    int mF;
    double current_sign = 1.0;
};

inline Environment make_chip_environment(ChipGeometry geom, FieldModel model,
                                         std::vector<PulseWindow> windows,
                                         bool with_gravity = true,
                                         double mass = kConst.mass_rb87) {
    return [geom, model, windows, with_gravity, mass](const Vec3& r, double t) {
        EnvSample e;
        if (with_gravity) {
            e.force[2] += mass * kConst.g_gravity;
            e.potential += -mass * kConst.g_gravity * r[2];
        }
        for (const auto& w : windows) {
            if (t < w.t0 || t >= w.t1) continue;
            ChipGeometry g = geom;
            g.current *= w.current_sign;
            const auto fs = field_at(g, r, model);
            const double c = w.mF * kConst.lande_gF * kConst.mu_bohr;
            e.potential += c * (fs.Bmag - g.bias_y);
            for (int j = 0; j < 3; ++j) e.force[j] += -c * fs.grad_Bmag[j];
            e.omega_sq[2] += c * fs.d2Bmag_dz2 / mass;
            // transverse curvature by finite differences of |B|
            for (int ax = 0; ax < 2; ++ax) {
                const double h = 20 * units::nm;
                Vec3 rp = r, rm = r;
                rp[ax] += h;
                rm[ax] -= h;
                const double vp = field_at(g, rp, model).Bmag;
                const double vm = field_at(g, rm, model).Bmag;
                e.omega_sq[ax] += c * (vp - 2.0 * fs.Bmag + vm) / (h * h) / mass;
            }
            break;
        }
        return e;
    };
}

/// Idealized environment: uniform gradient (constant force mF * f1 per unit
/// mF) inside pulse windows, no curvature, no gravity. Used for the
/// exactly-reversible closure tests.
inline Environment make_uniform_gradient_environment(double force_per_mf,
                                                     std::vector<PulseWindow> windows) {
    return [force_per_mf, windows](const Vec3& r, double t) {
        EnvSample e;
        for (const auto& w : windows) {
            if (t < w.t0 || t >= w.t1) continue;
            const double f = w.mF * w.current_sign * force_per_mf;
            e.force[2] += f;
            e.potential += -f * r[2];
            break;
        }
        return e;
    };
}

inline std::vector<PulseWindow> full_loop_windows(const FullLoopSequence& seq, bool high_branch) {
    // Branch that starts in mF = 2 is "high"; the other starts in mF = 1.
    const int mf_a = high_branch ? 2 : 1;
    const int mf_b = high_branch ? 1 : 2;
    const double ta = seq.t1;
    const double tb = ta + seq.td1;
    const double tc = tb + seq.t2 + seq.t3;
    const double td = tc + seq.td2;
    const double te = td + seq.t4;
    std::vector<PulseWindow> w;
    if (seq.scheme == LoopScheme::SpinInversion) {
        w.push_back({0.0, ta, mf_a, 1.0});
        w.push_back({tb, tc, mf_b, 1.0});  // pi pulse swapped the spins
        w.push_back({td, te, mf_a, 1.0});  // swapped back
    } else {
        w.push_back({0.0, ta, mf_a, 1.0});
        w.push_back({tb, tc, mf_a, -1.0});  // chip current reversed
        w.push_back({td, te, mf_a, 1.0});
    }
    return w;
}

inline double full_loop_duration(const FullLoopSequence& seq) {
    return seq.t1 + seq.td1 + seq.t2 + seq.t3 + seq.td2 + seq.t4;
}

/// Propagate both branches through a full-loop sequence in the supplied
/// environment factory and evaluate the recombination overlap.
inline FullLoopResult run_full_loop(const FullLoopSequence& seq,
                                    const std::function<Environment(bool)>& env_for_branch,
                                    WavepacketState initial,
                                    double mass = kConst.mass_rb87) {
    FullLoopResult out;
    out.branch_hi = initial;
    out.branch_lo = initial;
    const Environment env_hi = env_for_branch(true);
    const Environment env_lo = env_for_branch(false);

    const double ta = seq.t1;
    const double tb = ta + seq.td1;
    const double tc = tb + seq.t2 + seq.t3;
    const double td = tc + seq.td2;
    const double te = td + seq.t4;
    const std::array<std::array<double, 3>, 5> segments{{
        {0.0, ta, seq.dt_pulse},
        {ta, tb, seq.dt_free},
        {tb, tc, seq.dt_pulse},
        {tc, td, seq.dt_free},
        {td, te, seq.dt_pulse},
    }};
    for (const auto& sgmt : segments) {
        propagate(out.branch_hi, env_hi, sgmt[0], sgmt[1], sgmt[2], mass);
        propagate(out.branch_lo, env_lo, sgmt[0], sgmt[1], sgmt[2], mass);
    }

    std::complex<double> o(1.0, 0.0);
    for (int ax = 0; ax < 3; ++ax) {
        const double dz = out.branch_lo.r[ax] - out.branch_hi.r[ax];
        const double dp = mass * (out.branch_lo.v[ax] - out.branch_hi.v[ax]);
        o *= overlap_general(out.branch_hi.lambda[ax], out.branch_hi.lambda_dot[ax],
                             out.branch_lo.lambda[ax], out.branch_lo.lambda_dot[ax],
                             initial.sigma0[ax], dz, dp, mass);
    }
    o *= std::exp(std::complex<double>(0.0, (out.branch_lo.action - out.branch_hi.action) /
                                               kConst.hbar));
    out.overlap = o;
    out.visibility = std::abs(o);
    out.phase = std::arg(o);
    return out;
}

}  // namespace sgi
