#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sgi/constants.hpp"
#include "sgi/field_model.hpp"
#include "sgi/fringe_analysis.hpp"
#include "sgi/noise_stats.hpp"
#include "sgi/phase_space.hpp"
#include "sgi/quantum_solver.hpp"
#include "sgi/rng.hpp"
#include "sgi/wavepacket_dynamics.hpp"

namespace sgi {

struct VisibilityEstimate {
    double value = 0.0;
    double err = 0.0;
    std::string method;
    int n_shots = 0;
};

/// Half-loop (split + stop + time of flight) scenario parameters.
struct HalfLoopScenario {
    double t1 = 4 * units::us;       // splitting-pulse duration
    double td = 116 * units::us;     // delay before the stopping pulse
    double t2 = 200 * units::us;     // stopping-pulse duration
    double tof = 6760 * units::us;   // time of flight to imaging
    double omega = 2.0 * M_PI * 850.0;   // stopping curvature (rad/s)
    double kappa = 0.86e12;          // differential kick rate, 1/(m s)
    double z0 = 6.5 * units::um;     // packet distance from the field zero
    double sigma_z = 1.53 * units::um;   // packet width during splitting
    double current = 0.86;           // A (phase-noise lever arm)
};

/// Shot-to-shot fluctuations injected by the Monte-Carlo half-loop model.
struct FluctuationSpec {
    double current_rel = 0.0;   // relative current noise eta (Gaussian)
    double phase_rms = 0.0;     // extra uncorrelated phase noise, rad
    double position_rms = 0.0;  // envelope-center jitter, m
};

struct MultiShotResult {
    VisibilityEstimate v_multishot;        // normalized N-shot visibility V_N
    double v_single_mean = 0.0;
    double v_single_std = 0.0;
    double v_analytic = 0.0;               // infinite-N closed form
    double phase_std = 0.0;                // fitted-phase spread across shots
    std::vector<double> grid_z;            // coordinates of the averaged pattern
    std::vector<double> mean_pattern;
};

namespace detail {

/// Run fn(shot) for shot in [0, n) on up to n_threads workers; results are
/// written by index so the outcome is independent of scheduling.
inline void parallel_shots(int n, int n_threads, const std::function<void(int)>& fn) {
    n_threads = std::max(1, std::min(n_threads, n));
    if (n_threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += n_threads) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Monte-Carlo multi-shot half-loop: per-shot fringe patterns are synthesized
/// in splitting coordinates (relative to the field zero), averaged, and the
/// normalized visibility V_N = V(mean) / <V(single)> is estimated with the
/// Fourier method. Phase noise is correlated with the wavenumber noise
/// through the offset z0, exactly as in the closed-form model.
inline MultiShotResult run_half_loop(const HalfLoopScenario& sc, const FluctuationSpec& fl,
                                     int n_shots, std::uint64_t seed, int n_threads = 1) {
    if (n_shots < 1) throw std::invalid_argument("run_half_loop: n_shots must be positive");
    const int n = 2048;
    const double span = 40 * units::um;
    const double dz = span / n;
    const double z_lo = sc.z0 - 0.5 * span;

    std::vector<std::vector<double>> shots(n_shots, std::vector<double>(n));
    std::vector<double> vis_single(n_shots), phase_single(n_shots);
    const double kbar = sc.kappa * sc.t1;

    detail::parallel_shots(n_shots, n_threads, [&](int j) {
        CounterRng rng(seed, 0x4a1f000000000000ull ^ static_cast<std::uint64_t>(j));
        const double k_j = kbar * (1.0 + fl.current_rel * rng.gaussian());
        const double zc_j = sc.z0 + fl.position_rms * rng.gaussian();
        const double phi_j = fl.phase_rms * rng.gaussian();
        auto& pat = shots[j];
        for (int i = 0; i < n; ++i) {
            const double z = z_lo + i * dz;  // coordinate relative to the field zero
            const double env = std::exp(-(z - zc_j) * (z - zc_j) / (2.0 * sc.sigma_z * sc.sigma_z));
            pat[i] = env * (1.0 + std::cos(k_j * z + phi_j));
        }
        const auto fv = fringe::fft_visibility(pat, dz);
        vis_single[j] = fv.visibility;
        phase_single[j] = std::remainder(k_j * zc_j + phi_j, 2.0 * M_PI);
    });

    MultiShotResult out;
    const auto mean = stats::synthesize_multishot(shots);
    const auto fv_mean = fringe::fft_visibility(mean, dz);
    double vs = 0.0, vs2 = 0.0, pm = 0.0;
    for (double v : vis_single) {
        vs += v;
        vs2 += v * v;
    }
    vs /= n_shots;
    vs2 = std::sqrt(std::max(0.0, vs2 / n_shots - vs * vs));
    for (double p : phase_single) pm += p;
    pm /= n_shots;
    double pv = 0.0;
    for (double p : phase_single) pv += std::remainder(p - pm, 2.0 * M_PI) *
                                        std::remainder(p - pm, 2.0 * M_PI);

    out.v_single_mean = vs;
    out.v_single_std = vs2;
    out.phase_std = std::sqrt(pv / n_shots);
    out.v_multishot.value = fv_mean.visibility / vs;
    out.v_multishot.err = stats::finite_sample_std(out.v_multishot.value, n_shots);
    out.v_multishot.method = "fft";
    out.v_multishot.n_shots = n_shots;
    out.v_analytic = stats::visibility_vs_splittime(sc.t1, fl.current_rel, sc.kappa, sc.z0,
                                                    sc.sigma_z);
    if (fl.phase_rms > 0.0) out.v_analytic *= std::exp(-0.5 * fl.phase_rms * fl.phase_rms);
    out.grid_z.resize(n);
    for (int i = 0; i < n; ++i) out.grid_z[i] = z_lo + i * dz;
    out.mean_pattern = mean;
    return out;
}

/// Ensemble of full quantum splitting shots under random-vector potential
/// noise; returns the normalized visibility of the averaged pattern.
struct RandomVectorResult {
    VisibilityEstimate v_ensemble;
    double v_single_mean = 0.0;
    bool edge_warning = false;
};

inline RandomVectorResult run_random_vector_ensemble(const SplitInterfereParams& base,
                                                     int n_shots, int n_threads = 1) {
    std::vector<std::vector<double>> shots(n_shots);
    std::vector<double> vis_single(n_shots);
    bool edge = false;
    detail::parallel_shots(n_shots, n_threads, [&](int j) {
        SplitInterfereParams p = base;
        p.shot = static_cast<std::uint64_t>(j);
        const auto fp = split_and_interfere(p);
        if (fp.edge_warning) edge = true;
        shots[j] = fp.density;
        vis_single[j] = fringe::fft_visibility(fp.density, base.grid.dz).visibility;
    });
    const auto mean = stats::synthesize_multishot(shots);
    const auto fv = fringe::fft_visibility(mean, base.grid.dz);
    double vs = 0.0;
    for (double v : vis_single) vs += v;
    vs /= n_shots;

    RandomVectorResult out;
    out.v_single_mean = vs;
    out.v_ensemble.value = fv.visibility / vs;
    out.v_ensemble.err = stats::finite_sample_std(out.v_ensemble.value, n_shots);
    out.v_ensemble.method = "fft";
    out.v_ensemble.n_shots = n_shots;
    out.edge_warning = edge;
    return out;
}

struct ScanPoint {
    double t23;         // total reversed-gradient time T2 + T3
    double visibility;
    double phase;
    double population;  // at the supplied analysis phase
};

/// Scan the reversed-gradient duration at fixed total sequence time
/// (T2 + T3 + Td2 = const) and record overlap, phase and spin population.
inline std::vector<ScanPoint> run_full_loop_scan(
    const FullLoopSequence& base,
    const std::function<Environment(const FullLoopSequence&, bool)>& env_factory,
    const WavepacketState& initial, double t23_min, double t23_max, int n_points,
    double analysis_phase) {
    if (n_points < 2) throw std::invalid_argument("run_full_loop_scan: need >= 2 points");
    const double budget = base.t2 + base.t3 + base.td2;
    std::vector<ScanPoint> out(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double t23 = t23_min + (t23_max - t23_min) * i / (n_points - 1);
        if (t23 <= 0.0 || t23 >= budget)
            throw std::invalid_argument("run_full_loop_scan: t23 out of budget");
        FullLoopSequence seq = base;
        seq.t2 = 0.5 * t23;
        seq.t3 = 0.5 * t23;
        seq.td2 = budget - t23;
        // the environment must see the scanned pulse windows, not the base ones
        auto env_for_branch = [&](bool high) { return env_factory(seq, high); };
        const auto r = run_full_loop(seq, env_for_branch, initial);
        out[i] = {t23, r.visibility, r.phase,
                  0.5 * (1.0 + r.visibility * std::cos(r.phase + analysis_phase))};
    }
    return out;
}

/// Golden-section maximization of the recombination visibility over the
/// reversed-gradient duration (unimodal in practice).
inline ScanPoint optimize_sequence(
    const FullLoopSequence& base,
    const std::function<Environment(const FullLoopSequence&, bool)>& env_factory,
    const WavepacketState& initial, double t23_lo, double t23_hi, double tol = 1e-8) {
    const double budget = base.t2 + base.t3 + base.td2;
    auto vis_at = [&](double t23) {
        FullLoopSequence seq = base;
        seq.t2 = 0.5 * t23;
        seq.t3 = 0.5 * t23;
        seq.td2 = budget - t23;
        auto env_for_branch = [&](bool high) { return env_factory(seq, high); };
        return run_full_loop(seq, env_for_branch, initial);
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = t23_lo, b = t23_hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = vis_at(c).visibility, fd = vis_at(d).visibility;
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = vis_at(c).visibility;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = vis_at(d).visibility;
        }
    }
    const double best = 0.5 * (a + b);
    const auto r = vis_at(best);
    return {best, r.visibility, r.phase, 0.5 * (1.0 + r.visibility * std::cos(r.phase))};
}

/// The eight half-loop working points of the stopped-fringe data set.
struct HalfLoopTableRow {
    double t1_us, td_us, t2_us, tof_us;
    double xi, exp_d_um, calc_d_um, sigma_min_um;
};

inline const std::vector<HalfLoopTableRow>& half_loop_table() {
    static const std::vector<HalfLoopTableRow> rows{
        {4, 116, 200, 6760, 1.18, 0.55, 0.54, 0.120},
        {6, 174, 150, 6750, 1.37, 0.98, 0.94, 0.140},
        {8, 132, 180, 8760, 1.22, 1.14, 1.13, 0.125},
        {10, 90, 220, 12760, 1.11, 1.31, 1.28, 0.113},
        {12, 130, 200, 12738, 1.22, 1.66, 1.68, 0.124},
        {14, 106, 200, 13810, 1.15, 1.92, 1.85, 0.1174},
        {16, 114, 200, 13800, 1.18, 2.25, 2.16, 0.12},
        {10, 600, 70, 21450, 3.36, 3.93, 3.90, 0.34},
    };
    return rows;
}

}  // namespace sgi
