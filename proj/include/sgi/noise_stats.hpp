#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sgi {
namespace stats {

/// Infinite-N visibility of the averaged fringe pattern when the shot phase
/// noise is fully correlated with the wavenumber noise (dphi = z0 dk):
/// V = exp(-dphi^2 / 2(1 + sigma^2 dk^2)) / sqrt(1 + sigma^2 dk^2).
inline double analytic_visibility(double dphi_rms, double dk_rms, double sigma_z) {
    const double s2k2 = sigma_z * sigma_z * dk_rms * dk_rms;
    return std::exp(-0.5 * dphi_rms * dphi_rms / (1.0 + s2k2)) / std::sqrt(1.0 + s2k2);
}

/// Visibility vs splitting time for relative current noise eta:
/// dk = eta kappa T, dphi = kappa z0 eta T.
inline double visibility_vs_splittime(double t_split, double eta, double kappa, double z0,
                                      double sigma_z) {
    const double dk = eta * kappa * t_split;
    return analytic_visibility(z0 * dk, dk, sigma_z);
}

/// Extended infinite-N formula with phase noise dphi uncorrelated from the
/// wavenumber noise dk, envelope width sigma_bar and offset between the
/// envelope center and the phase-reference point (zbar - z0):
/// V = e^{-dphi^2/2} e^{-(zbar-z0)^2 dk^2 / 2(1+sigma^2 dk^2)} / sqrt(1+sigma^2 dk^2).
inline double extended_multishot(double dphi_rms, double dk_rms, double sigma_bar,
                                 double center_offset) {
    const double s2k2 = sigma_bar * sigma_bar * dk_rms * dk_rms;
    return std::exp(-0.5 * dphi_rms * dphi_rms) *
           std::exp(-0.5 * center_offset * center_offset * dk_rms * dk_rms / (1.0 + s2k2)) /
           std::sqrt(1.0 + s2k2);
}

/// Finite-sample visibility spread from averaging N shots of true visibility
/// V: Delta V = sqrt((1 - V^2) / N) (quadratic-mean sense,
/// <V_N^2> - V^2 = (1 - V^2)/N exactly for i.i.d. shot phases).
inline double finite_sample_std(double visibility, int n_shots) {
    if (n_shots <= 0) throw std::invalid_argument("finite_sample_std: n_shots must be positive");
    return std::sqrt(std::max(0.0, 1.0 - visibility * visibility) /
                     static_cast<double>(n_shots));
}

/// Combined error bar on a normalized N-shot visibility V_N given the fit
/// error of the averaged pattern (dV_a on V_a), the spread of the single-shot
/// visibilities (dV_s around mean <V_s>), and the finite-sample term.
inline double error_bar(double v_n, double dv_avg, double v_avg, double dv_single,
                        double v_single_mean, int n_shots) {
    const double t1 = dv_avg / v_avg;
    const double t2 = dv_single / v_single_mean;
    const double t3 = (1.0 - v_n * v_n) / v_n;
    return v_n * std::sqrt(t1 * t1 + t2 * t2 / n_shots + 0.5 * t3 * t3 / n_shots);
}

/// Pointwise average of per-shot fringe patterns (optionally weighted).
inline std::vector<double> synthesize_multishot(const std::vector<std::vector<double>>& shots,
                                                const std::vector<double>* weights = nullptr) {
    if (shots.empty()) throw std::invalid_argument("synthesize_multishot: no shots");
    const std::size_t n = shots.front().size();
    std::vector<double> mean(n, 0.0);
    double wsum = 0.0;
    for (std::size_t s = 0; s < shots.size(); ++s) {
        if (shots[s].size() != n)
            throw std::invalid_argument("synthesize_multishot: shot length mismatch");
        const double w = weights ? (*weights)[s] : 1.0;
        wsum += w;
        for (std::size_t i = 0; i < n; ++i) mean[i] += w * shots[s][i];
    }
    for (auto& v : mean) v /= wsum;
    return mean;
}

/// Current offset that produces a target interferometer phase offset:
/// phase is linear in current with slope kappa z0 T1 / I.
inline double phase_to_current_offset(double phase, double kappa, double z0, double t_split,
                                      double current) {
    return phase * current / (kappa * z0 * t_split);
}

}  // namespace stats
}  // namespace sgi
