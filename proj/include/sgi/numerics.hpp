#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sgi {

/// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on
/// the Legendre polynomial (good to ~1e-15 for n up to a few hundred).
struct GaussLegendre {
    std::vector<double> x, w;

    explicit GaussLegendre(int n) {
        x.resize(n);
        w.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * xi * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (xi * p0 - p1) / (xi * xi - 1.0);
                const double dx = p0 / pp;
                xi -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            x[i] = -xi;
            x[n - 1 - i] = xi;
            w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
        }
    }

    /// Integrate f over [a,b].
    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(c + h * x[i]);
        return s * h;
    }
};

/// integral of exp(-a z^2 + b z + c) over the real line, Re(a) > 0.
inline std::complex<double> gaussian_integral(std::complex<double> a,
                                              std::complex<double> b,
                                              std::complex<double> c) {
    return std::sqrt(M_PI / a) * std::exp(b * b / (4.0 * a) + c);
}

/// In-place radix-2 FFT (n must be a power of two).
inline void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: size not a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

/// Solve A x = b in place by Gaussian elimination with partial pivoting.
/// Intended for the small systems of the fitters (k <= ~10).
inline std::vector<double> solve_linear(std::vector<std::vector<double>> A,
                                        std::vector<double> b) {
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-300) throw std::runtime_error("solve_linear: singular matrix");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= A[i][c] * x[c];
        x[i] = s / A[i][i];
    }
    return x;
}

/// Matrix inverse via Gauss-Jordan (small matrices only).
inline std::vector<std::vector<double>> invert_matrix(std::vector<std::vector<double>> A) {
    const std::size_t n = A.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-300) throw std::runtime_error("invert_matrix: singular matrix");
        std::swap(A[piv], A[col]);
        std::swap(inv[piv], inv[col]);
        const double d = A[col][col];
        for (std::size_t c = 0; c < n; ++c) {
            A[col][c] /= d;
            inv[col][c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = A[r][col];
            for (std::size_t c = 0; c < n; ++c) {
                A[r][c] -= f * A[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

struct LmResult {
    std::vector<double> params;
    std::vector<double> errors;      // 1-sigma from (J^T J)^-1 scaled by residual variance
    double cost = 0.0;               // sum of squared residuals
    double r_squared = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) with forward-difference
/// Jacobians. `model(x, p)` evaluates the fit function.
inline LmResult lm_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::function<double(double, const std::vector<double>&)>& model,
                       std::vector<double> p,
                       int max_iter = 200) {
    const std::size_t n = xs.size(), k = p.size();
    auto residuals = [&](const std::vector<double>& q) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = ys[i] - model(xs[i], q);
        return r;
    };
    auto cost_of = [&](const std::vector<double>& r) {
        double s = 0.0;
        for (double v : r) s += v * v;
        return s;
    };

    std::vector<double> r = residuals(p);
    double cost = cost_of(r);
    double lambda = 1e-3;
    LmResult out;

    std::vector<std::vector<double>> J(n, std::vector<double>(k));
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        for (std::size_t j = 0; j < k; ++j) {
            const double h = 1e-7 * std::max(std::abs(p[j]), 1e-12);
            auto pj = p;
            pj[j] += h;
            for (std::size_t i = 0; i < n; ++i)
                J[i][j] = (model(xs[i], pj) - (ys[i] - r[i])) / h;
        }
        std::vector<std::vector<double>> JtJ(k, std::vector<double>(k, 0.0));
        std::vector<double> Jtr(k, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < k; ++a) {
                Jtr[a] += J[i][a] * r[i];
                for (std::size_t b = a; b < k; ++b) JtJ[a][b] += J[i][a] * J[i][b];
            }
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < a; ++b) JtJ[a][b] = JtJ[b][a];

        bool stepped = false;
        for (int tries = 0; tries < 40 && !stepped; ++tries) {
            auto A = JtJ;
            for (std::size_t a = 0; a < k; ++a) A[a][a] += lambda * std::max(JtJ[a][a], 1e-30);
            std::vector<double> dp;
            try {
                dp = solve_linear(A, Jtr);
            } catch (const std::runtime_error&) {
                lambda *= 10.0;
                continue;
            }
            auto pn = p;
            for (std::size_t a = 0; a < k; ++a) pn[a] += dp[a];
            const auto rn = residuals(pn);
            const double cn = cost_of(rn);
            if (cn <= cost) {
                double step2 = 0.0, p2 = 0.0;
                for (std::size_t a = 0; a < k; ++a) {
                    step2 += dp[a] * dp[a];
                    p2 += pn[a] * pn[a];
                }
                const double rel = (cost - cn) / std::max(cost, 1e-300);
                p = pn;
                r = rn;
                cost = cn;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel < 1e-10 || std::sqrt(step2) < 1e-12 * (1.0 + std::sqrt(p2))) {
                    out.converged = true;
                }
            } else {
                lambda *= 10.0;
            }
        }
        if (!stepped) {
            out.converged = true;  // no downhill step left
            break;
        }
        if (out.converged) break;
    }

    out.params = p;
    out.cost = cost;
    out.iterations = iter + 1;
    double mean = 0.0;
    for (double v : ys) mean += v;
    mean /= static_cast<double>(n);
    double tss = 0.0;
    for (double v : ys) tss += (v - mean) * (v - mean);
    out.r_squared = tss > 0.0 ? 1.0 - cost / tss : 1.0;

    out.errors.assign(k, 0.0);
    if (n > k) {
        const double s2 = cost / static_cast<double>(n - k);
        try {
            std::vector<std::vector<double>> JtJ(k, std::vector<double>(k, 0.0));
            for (std::size_t j = 0; j < k; ++j) {
                const double h = 1e-7 * std::max(std::abs(p[j]), 1e-12);
                auto pj = p;
                pj[j] += h;
                for (std::size_t i = 0; i < n; ++i)
                    J[i][j] = (model(xs[i], pj) - model(xs[i], p)) / h;
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b) JtJ[a][b] += J[i][a] * J[i][b];
            const auto C = invert_matrix(JtJ);
            for (std::size_t a = 0; a < k; ++a)
                out.errors[a] = std::sqrt(std::max(0.0, s2 * C[a][a]));
        } catch (const std::runtime_error&) {
            // leave zero errors when the normal matrix is singular
        }
    }
    return out;
}

}  // namespace sgi
