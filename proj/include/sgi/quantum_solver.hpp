#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "sgi/constants.hpp"
#include "sgi/field_model.hpp"
#include "sgi/rng.hpp"

namespace sgi {

struct Grid1D {
    double z0 = 95 * units::um - 0.5 * 3000 * 5 * units::nm;  // first point
    double dz = 5 * units::nm;
    int n = 3000;

    double z(int i) const { return z0 + i * dz; }
    double span() const { return (n - 1) * dz; }
};

struct WaveFunction {
    Grid1D grid;
    std::vector<std::complex<double>> psi;
    bool edge_warning = false;  // set when |psi|^2 at the boundary exceeds 1e-6 of max

    double norm_sq() const {
        double s = 0.0;
        for (const auto& a : psi) s += std::norm(a);
        return s * grid.dz;
    }

    void check_edges() {
        double mx = 0.0;
        for (const auto& a : psi) mx = std::max(mx, std::norm(a));
        if (std::norm(psi.front()) > 1e-6 * mx || std::norm(psi.back()) > 1e-6 * mx)
            edge_warning = true;
    }

    double mean_z() const {
        double s = 0.0, n2 = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            const double w = std::norm(psi[i]);
            s += w * grid.z(i);
            n2 += w;
        }
        return s / n2;
    }

    double sigma_z() const {
        const double zc = mean_z();
        double s = 0.0, n2 = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            const double w = std::norm(psi[i]);
            const double d = grid.z(i) - zc;
            s += w * d * d;
            n2 += w;
        }
        return std::sqrt(s / n2);
    }
};

inline WaveFunction make_gaussian(const Grid1D& grid, double center, double sigma, double k0 = 0.0) {
    WaveFunction wf;
    wf.grid = grid;
    wf.psi.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double z = grid.z(i);
        const double envelope = std::exp(-(z - center) * (z - center) / (4.0 * sigma * sigma));
        wf.psi[i] = std::polar(envelope, k0 * z);
    }
    const double nm = std::sqrt(wf.norm_sq());
    for (auto& a : wf.psi) a /= nm;
    return wf;
}

/// Crank-Nicolson propagator for a static potential, Dirichlet boundaries.
/// The implicit tridiagonal factorization is precomputed once, so stepping is
/// O(n) with small constants; unconditionally stable and exactly
/// norm-preserving up to roundoff.
class CrankNicolson {
  public:
    CrankNicolson(const Grid1D& grid, const std::vector<double>& potential, double dt,
                  double mass = kConst.mass_rb87) {
        const int n = grid.n;
        if (static_cast<int>(potential.size()) != n)
            throw std::invalid_argument("CrankNicolson: potential size mismatch");
        const double hbar = kConst.hbar;
        const double t = hbar * hbar / (2.0 * mass * grid.dz * grid.dz);  // kinetic scale, J
        const std::complex<double> ib(0.0, dt / (2.0 * hbar));
        // H tridiagonal: diag = 2t + V_i, off = -t
        a_off_ = ib * (-t);
        b_off_ = -a_off_;
        a_diag_.resize(n);
        b_diag_.resize(n);
        for (int i = 0; i < n; ++i) {
            const std::complex<double> ihd = ib * (2.0 * t + potential[i]);
            a_diag_[i] = 1.0 + ihd;
            b_diag_[i] = 1.0 - ihd;
        }
        // Thomas factorization of A
        low_.resize(n);
        inv_den_.resize(n);
        std::complex<double> den = a_diag_[0];
        inv_den_[0] = 1.0 / den;
        low_[0] = 0.0;
        for (int i = 1; i < n; ++i) {
            low_[i] = a_off_ * inv_den_[i - 1];
            den = a_diag_[i] - low_[i] * a_off_;
            inv_den_[i] = 1.0 / den;
        }
        rhs_.resize(n);
    }

    void step(std::vector<std::complex<double>>& psi) {
        const int n = static_cast<int>(psi.size());
        // rhs = B psi
        rhs_[0] = b_diag_[0] * psi[0] + b_off_ * psi[1];
        for (int i = 1; i < n - 1; ++i)
            rhs_[i] = b_off_ * psi[i - 1] + b_diag_[i] * psi[i] + b_off_ * psi[i + 1];
        rhs_[n - 1] = b_off_ * psi[n - 2] + b_diag_[n - 1] * psi[n - 1];
        // forward eliminate, back substitute
        for (int i = 1; i < n; ++i) rhs_[i] -= low_[i] * rhs_[i - 1];
        psi[n - 1] = rhs_[n - 1] * inv_den_[n - 1];
        for (int i = n - 2; i >= 0; --i) psi[i] = (rhs_[i] - a_off_ * psi[i + 1]) * inv_den_[i];
    }

  private:
    std::complex<double> a_off_{}, b_off_{};
    std::vector<std::complex<double>> a_diag_, b_diag_, low_, inv_den_, rhs_;
};

inline void evolve(WaveFunction& wf, const std::vector<double>& potential, double dt, int steps,
                   double mass = kConst.mass_rb87) {
    CrankNicolson cn(wf.grid, potential, dt, mass);
    for (int s = 0; s < steps; ++s) cn.step(wf.psi);
    wf.check_edges();
}

/// Time-dependent variant; refactors whenever the supplied potential changes
/// (callback returns a pointer to the current potential per step).
template <class PotentialOfStep>
inline void evolve_timedep(WaveFunction& wf, PotentialOfStep&& pot_at, double dt, int steps,
                           double mass = kConst.mass_rb87) {
    const std::vector<double>* prev = nullptr;
    std::unique_ptr<CrankNicolson> cn;
    for (int s = 0; s < steps; ++s) {
        const std::vector<double>* v = pot_at(s);
        if (v != prev) {
            cn = std::make_unique<CrankNicolson>(wf.grid, *v, dt, mass);
            prev = v;
        }
        cn->step(wf.psi);
    }
    wf.check_edges();
}

enum class NoiseCorrelation {
    Zero,      // i.i.d. uniform[-1,1] draw per grid point
    Infinite,  // a single uniform[-1,1] draw for the whole vector
};

/// Multiplicative random-vector perturbation: V' = V (1 + eps u), where u is
/// the supplied correlation pattern.
inline std::vector<double> noise_pattern(int n, NoiseCorrelation corr, CounterRng& rng) {
    std::vector<double> u(n);
    if (corr == NoiseCorrelation::Infinite) {
        const double v = rng.uniform_pm1();
        for (auto& e : u) e = v;
    } else {
        for (auto& e : u) e = rng.uniform_pm1();
    }
    return u;
}

inline std::vector<double> perturbed_potential(const std::vector<double>& v_m, double eps,
                                               const std::vector<double>& pattern) {
    if (v_m.size() != pattern.size())
        throw std::invalid_argument("perturbed_potential: pattern size mismatch");
    std::vector<double> out(v_m.size());
    for (std::size_t i = 0; i < v_m.size(); ++i) out[i] = v_m[i] * (1.0 + eps * pattern[i]);
    return out;
}

struct FringePattern {
    Grid1D grid;
    std::vector<double> density;
    bool edge_warning = false;
};

struct SplitInterfereParams {
    ChipGeometry geom{};
    Grid1D grid{};
    double packet_center = 95 * units::um;
    double packet_sigma = 1.2 * units::um;
    double t_split = 10 * units::us;   // gradient-pulse duration
    double dt = 1e-8;
    double eps = 0.0;
    NoiseCorrelation corr = NoiseCorrelation::Infinite;
    std::uint64_t seed = 1;
    std::uint64_t shot = 0;
};

/// One shot of the 1D splitting model: the initial packet evolves under the
/// chip-only potentials of mF = 1 and mF = 2 (each with its own noise
/// realization) and the two components are interfered.
inline FringePattern split_and_interfere(const SplitInterfereParams& p) {
    std::vector<double> v1(p.grid.n), v2(p.grid.n);
    for (int i = 0; i < p.grid.n; ++i) {
        v1[i] = zeeman_potential_chip_only(p.geom, p.grid.z(i), 1);
        v2[i] = 2.0 * v1[i];
    }
    const int steps = static_cast<int>(std::llround(p.t_split / p.dt));
    WaveFunction psi1 = make_gaussian(p.grid, p.packet_center, p.packet_sigma);
    WaveFunction psi2 = psi1;

    if (p.eps != 0.0) {
        CounterRng rng(p.seed, 0x5151000000000000ull ^ p.shot);
        const auto u1 = noise_pattern(p.grid.n, p.corr, rng);
        const auto u2 = (p.corr == NoiseCorrelation::Infinite)
                            ? u1
                            : noise_pattern(p.grid.n, p.corr, rng);
        evolve(psi1, perturbed_potential(v1, p.eps, u1), p.dt, steps);
        evolve(psi2, perturbed_potential(v2, p.eps, u2), p.dt, steps);
    } else {
        evolve(psi1, v1, p.dt, steps);
        evolve(psi2, v2, p.dt, steps);
    }

    FringePattern fp;
    fp.grid = p.grid;
    fp.density.resize(p.grid.n);
    for (int i = 0; i < p.grid.n; ++i) fp.density[i] = 0.5 * std::norm(psi1.psi[i] + psi2.psi[i]);
    fp.edge_warning = psi1.edge_warning || psi2.edge_warning;
    return fp;
}

}  // namespace sgi
