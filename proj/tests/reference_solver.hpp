// Slow reference for the default scheme: full level storage, direct
// history sums, dense Gaussian elimination and a bracketing root search for
// the boundary. Shares nothing with the production stepper beyond the
// parameter structs.
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fronfix/model.hpp"

namespace reference {

using Matrix = std::vector<std::vector<double>>;

inline std::vector<double> dense_solve(Matrix a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        if (a[piv][k] == 0.0) throw std::runtime_error("singular dense system");
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

struct Result {
    std::vector<std::vector<double>> v;  // v[n][m]
    std::vector<double> xf;
};

class Solver {
public:
    Solver(const fronfix::ModelParams& p, const fronfix::GridSpec& g) : p_(p), g_(g) {
        classical_ = p.alpha == 1.0;
        if (!classical_) {
            double x = p.alpha * g.dtau / (1.0 - p.alpha);
            rho_ = std::exp(-x);
            pre_ = (std::exp(x) - 1.0) / (g.dtau * p.alpha);
        }
    }

    // Fractional derivative at the new level over a series whose last entry is
    // the trial value; classical mode is the backward difference.
    double derivative(const std::vector<double>& series) const {
        const std::size_t n = series.size() - 1;
        if (classical_) return (series[n] - series[n - 1]) / g_.dtau;
        double s = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            s += (series[n + 1 - k] - series[n - k]) * std::pow(rho_, double(k));
        return pre_ * s;
    }

    double spatial(const std::vector<double>& v, int m) const {
        const double s2 = p_.sigma * p_.sigma, dy = g_.dy;
        return 0.5 * s2 * (v[m + 1] - 2 * v[m] + v[m - 1]) / (dy * dy) +
               (p_.rate - 0.5 * s2) * (v[m + 1] - v[m - 1]) / (2 * dy) - p_.rate * v[m];
    }

    double boundary_v1(double x) const {
        const double s2 = p_.sigma * p_.sigma, dy = g_.dy;
        return 1.0 - x - dy * x + dy * dy / s2 * (p_.rate - 0.5 * s2 * x);
    }

    // Residual of row m given the full new level.
    double row_residual(const std::vector<double>& nv, double x, int m) const {
        const int n = static_cast<int>(levels_.size()) - 1;
        std::vector<double> series(n + 2), xs(n + 2);
        for (int j = 0; j <= n; ++j) {
            series[j] = levels_[j][m];
            xs[j] = xf_[j];
        }
        series[n + 1] = nv[m];
        xs[n + 1] = x;
        const double rate = derivative(xs);
        const auto& v = levels_.back();
        const double conv = rate / xf_.back() *
                            0.5 * ((nv[m + 1] - nv[m - 1]) + (v[m + 1] - v[m - 1])) / (2 * g_.dy);
        return derivative(series) - 0.5 * (spatial(nv, m) + spatial(v, m)) - conv;
    }

    // Interior solve for a trial boundary; returns the full new level.
    std::vector<double> interior(double x) const {
        const int M = g_.nodes, k = M - 1;
        std::vector<double> base(M + 1, 0.0);
        base[0] = 1.0 - x;
        // row residuals are affine in the unknowns: probe with unit vectors
        std::vector<double> r0(k);
        for (int i = 0; i < k; ++i) r0[i] = row_residual(base, x, i + 1);
        Matrix a(k, std::vector<double>(k, 0.0));
        for (int j = 0; j < k; ++j) {
            auto e = base;
            e[j + 1] = 1.0;
            for (int i = 0; i < k; ++i) a[i][j] = row_residual(e, x, i + 1) - r0[i];
        }
        std::vector<double> rhs(k);
        for (int i = 0; i < k; ++i) rhs[i] = -r0[i];
        auto sol = dense_solve(a, rhs);
        for (int i = 0; i < k; ++i) base[i + 1] = sol[i];
        return base;
    }

    // Row-1 residual with v^1 taken from the boundary relation.
    double boundary_residual(double x) const {
        auto nv = interior(x);
        nv[1] = boundary_v1(x);
        return row_residual(nv, x, 1);
    }

    // Bracket outward from X_f^n in both directions, then bisect.
    double find_boundary() const {
        const double x0 = xf_.back();
        const double f0 = boundary_residual(x0);
        if (f0 == 0.0) return x0;
        double lo = x0, hi = x0, flo = f0;
        bool found = false;
        for (double step = 1e-4; step < 4.0 && !found; step *= 1.5) {
            for (double cand : {x0 - step, x0 + step}) {
                double fc = boundary_residual(cand);
                if (fc * f0 <= 0.0) {
                    lo = std::min(x0, cand);
                    hi = std::max(x0, cand);
                    flo = lo == x0 ? f0 : fc;
                    found = true;
                    break;
                }
            }
        }
        if (!found) throw std::runtime_error("no bracket for the boundary");
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = boundary_residual(mid);
            if (fm == 0.0) return mid;
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    Result run() {
        const int M = g_.nodes;
        levels_.assign(1, std::vector<double>(M + 1, 0.0));
        xf_.assign(1, 1.0);
        for (int n = 0; n < g_.steps; ++n) {
            double x = find_boundary();
            levels_.push_back(interior(x));
            xf_.push_back(x);
        }
        return {levels_, xf_};
    }

private:
    fronfix::ModelParams p_;
    fronfix::GridSpec g_;
    bool classical_ = true;
    double rho_ = 0.0, pre_ = 0.0;
    std::vector<std::vector<double>> levels_;
    std::vector<double> xf_;
};

inline Result solve(const fronfix::ModelParams& p, const fronfix::GridSpec& g) {
    return Solver(p, g).run();
}

}  // namespace reference
