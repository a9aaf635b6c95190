#include "fronfix/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fronfix/errors.hpp"

namespace fronfix {

std::string_view to_string(OracleMethod m) {
    switch (m) {
        case OracleMethod::binomial: return "binomial";
        case OracleMethod::psor: return "psor";
        case OracleMethod::european: return "european";
    }
    return "unknown";
}

namespace {

void check_market(const ModelParams& p, double s0) {
    if (!(p.sigma > 0.0) || !(p.strike > 0.0) || !(p.maturity > 0.0) || !(p.rate >= 0.0))
        throw DomainError("oracle needs sigma, E, T > 0 and r >= 0");
    if (!(s0 > 0.0)) throw DomainError("S0 must be positive");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double european_put_closed_form(const ModelParams& p, double s0) {
    check_market(p, s0);
    const double vt = p.sigma * std::sqrt(p.maturity);
    const double df = std::exp(-p.rate * p.maturity);
    const double d1 = (std::log(s0 / p.strike) + (p.rate + 0.5 * p.sigma * p.sigma) * p.maturity) / vt;
    const double d2 = d1 - vt;
    return p.strike * df * normal_cdf(-d2) - s0 * normal_cdf(-d1);
}

OraclePrice binomial_american_put(const ModelParams& p, double s0, int steps) {
    check_market(p, s0);
    if (steps < 1) throw DomainError("binomial tree needs at least one step");
    const double dt = p.maturity / steps;
    const double u = std::exp(p.sigma * std::sqrt(dt));
    const double d = 1.0 / u;
    const double growth = std::exp(p.rate * dt);
    const double q = (growth - d) / (u - d);
    const double disc = 1.0 / growth;

    std::vector<double> val(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) {
        double s = s0 * std::pow(u, 2 * i - steps);
        val[i] = std::max(p.strike - s, 0.0);
    }
    for (int n = steps - 1; n >= 0; --n) {
        for (int i = 0; i <= n; ++i) {
            double s = s0 * std::pow(u, 2 * i - n);
            double cont = disc * (q * val[i + 1] + (1.0 - q) * val[i]);
            val[i] = std::max(cont, p.strike - s);
        }
    }
    return {val[0], OracleMethod::binomial, steps, std::nullopt};
}

namespace {

OraclePrice cn_put(const ModelParams& p, double s0, const PsorOptions& o, bool american) {
    check_market(p, s0);
    if (o.space_nodes < 4 || o.time_steps < 1) throw DomainError("bad PSOR resolution");
    if (!(o.omega > 0.0 && o.omega < 2.0)) throw DomainError("omega must lie in (0,2)");
    if (!(o.tol > 0.0)) throw DomainError("tol must be positive");
    const int J = o.space_nodes;
    const double smax = o.s_max_factor * p.strike;
    if (s0 >= smax) throw DomainError("S0 beyond the grid");
    const double ds = smax / J;
    const double E = p.strike;
    const double s2 = p.sigma * p.sigma;

    std::vector<double> lo(J + 1), di(J + 1), up(J + 1), obst(J + 1), v(J + 1), rhs(J + 1);
    for (int j = 0; j <= J; ++j) {
        const double jj = j;
        lo[j] = 0.5 * (s2 * jj * jj - p.rate * jj);
        di[j] = -(s2 * jj * jj + p.rate);
        up[j] = 0.5 * (s2 * jj * jj + p.rate * jj);
        obst[j] = std::max(E - j * ds, 0.0);
        v[j] = obst[j];
    }

    // sequence of (dt, theta) substeps
    std::vector<std::pair<double, double>> plan;
    const double dt = p.maturity / o.time_steps;
    const int start = std::max(0, o.implicit_startup);
    if (start > 0) {
        for (int k = 0; k < start; ++k) plan.emplace_back(dt / start, 1.0);
    } else {
        plan.emplace_back(dt, 0.5);
    }
    for (int n = 1; n < o.time_steps; ++n) plan.emplace_back(dt, 0.5);

    double tau = 0.0;
    for (auto [h, th] : plan) {
        tau += h;
        const double ex = (1.0 - th) * h;
        for (int j = 1; j < J; ++j)
            rhs[j] = v[j] + ex * (lo[j] * v[j - 1] + di[j] * v[j] + up[j] * v[j + 1]);
        v[0] = american ? E : E * std::exp(-p.rate * tau);
        v[J] = 0.0;
        const double im = th * h;
        if (american) {
            int sweep = 0;
            for (;; ++sweep) {
                if (sweep >= o.max_sweeps)
                    throw NumericalError("PSOR did not converge within max sweeps");
                double change = 0.0;
                for (int j = 1; j < J; ++j) {
                    double y = (rhs[j] + im * (lo[j] * v[j - 1] + up[j] * v[j + 1])) /
                               (1.0 - im * di[j]);
                    double nv = std::max(obst[j], v[j] + o.omega * (y - v[j]));
                    change = std::max(change, std::abs(nv - v[j]));
                    v[j] = nv;
                }
                if (change <= o.tol) break;
            }
        } else {
            // Thomas on (1 - im L) v = rhs
            std::vector<double> cp(J), dp(J);
            const int n = J - 1;
            for (int i = 0; i < n; ++i) {
                int j = i + 1;
                double a = -im * lo[j], b = 1.0 - im * di[j], c = -im * up[j];
                double r = rhs[j];
                if (j == 1) r -= a * v[0];
                if (i == 0) {
                    cp[i] = c / b;
                    dp[i] = r / b;
                } else {
                    double den = b - a * cp[i - 1];
                    cp[i] = c / den;
                    dp[i] = (r - a * dp[i - 1]) / den;
                }
            }
            v[n] = dp[n - 1];
            for (int i = n - 2; i >= 0; --i) v[i + 1] = dp[i] - cp[i] * v[i + 2];
        }
    }

    const int j0 = std::min(static_cast<int>(s0 / ds), J - 1);
    const double t = s0 / ds - j0;
    OraclePrice out;
    out.price = (1.0 - t) * v[j0] + t * v[j0 + 1];
    out.method = american ? OracleMethod::psor : OracleMethod::european;
    out.resolution = J;
    if (american) {
        for (int j = J - 1; j >= 1; --j) {
            if (j * ds < E && v[j] <= obst[j] + 1e-12) {
                out.boundary_estimate = j * ds;
                break;
            }
        }
    }
    return out;
}

}  // namespace

OraclePrice psor_american_put(const ModelParams& p, double s0, const PsorOptions& opts) {
    return cn_put(p, s0, opts, true);
}

OraclePrice european_cn_put(const ModelParams& p, double s0, const PsorOptions& opts) {
    return cn_put(p, s0, opts, false);
}

}  // namespace fronfix
