#include "fronfix/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "fronfix/errors.hpp"
#include "fronfix/parallel.hpp"

namespace fronfix {

Lemma1Report lemma1_check(const ModelParams& p, const GridSpec& g) {
    Lemma1Report rep;
    const double s2 = p.sigma * p.sigma;
    const double drift = std::abs(p.rate - 0.5 * s2);
    rep.timestep_bound = g.dy * g.dy / (p.rate * g.dy * g.dy + s2);
    rep.cond_timestep = g.dtau <= rep.timestep_bound;
    if (drift <= 1e-15 * std::max(1.0, s2)) {
        rep.convection_skipped = true;
        rep.cond_convection = true;
        rep.convection_bound = INFINITY;
    } else {
        rep.convection_bound = s2 * g.dtau / drift;
        rep.cond_convection = g.dy <= rep.convection_bound;
    }
    return rep;
}

Lemma1Report lemma1_check(const SolverResult& run) {
    auto rep = lemma1_check(run.params, run.grid);
    rep.coefficient_signs.reserve(run.steps.size());
    for (std::size_t n = 0; n < run.steps.size(); ++n) {
        const auto& c = run.steps[n].lagged_coefficients;
        rep.coefficient_signs.push_back({static_cast<int>(n), c.A, c.B, c.C});
        rep.negative_A += c.A < 0.0;
        rep.negative_B += c.B < 0.0;
        rep.negative_C += c.C < 0.0;
    }
    return rep;
}

std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::xf_nonpositive: return "xf_nonpositive";
        case ViolationKind::xf_increase: return "xf_increase";
        case ViolationKind::v_negative: return "v_negative";
        case ViolationKind::v_increase_in_m: return "v_increase_in_m";
    }
    return "unknown";
}

int AuditReport::count(ViolationKind k) const {
    return static_cast<int>(std::count_if(violations.begin(), violations.end(),
                                          [k](const Violation& v) { return v.kind == k; }));
}

AuditReport monotonicity_audit(const SolutionSurface& s, double tol) {
    AuditReport rep;
    rep.tolerance = tol;
    auto flag = [&](ViolationKind k, int n, int m, double amount, double& worst) {
        worst = std::max(worst, amount);
        if (amount > tol) rep.violations.push_back({k, n, m, amount});
    };
    for (int n = 0; n <= s.steps(); ++n) {
        const double x = s.xf(n);
        if (!(x > 0.0)) {
            rep.max_xf_nonpositive = std::max(rep.max_xf_nonpositive, -x);
            rep.violations.push_back({ViolationKind::xf_nonpositive, n, -1, -x});
        }
        if (n > 0) flag(ViolationKind::xf_increase, n, -1, x - s.xf(n - 1), rep.max_xf_increase);
        for (int m = 0; m <= s.nodes(); ++m) {
            flag(ViolationKind::v_negative, n, m, -s.v(n, m), rep.max_v_negative);
            if (m > 0)
                flag(ViolationKind::v_increase_in_m, n, m, s.v(n, m) - s.v(n, m - 1),
                     rep.max_v_increase);
        }
    }
    return rep;
}

Amplification amplification_factor(const AmplificationQuery& q) {
    if (q.n < 1) throw DomainError("amplification needs n >= 1");
    if (q.b == 0.0 || q.a == 0.0) throw DomainError("b and a must be nonzero");
    if (!(q.xf_curr > 0.0)) throw DomainError("xf_curr must be positive");
    const auto& p = q.params;
    const auto& g = q.grid;
    const auto w = cf_weights(p.alpha, g.dtau);
    // P rho^k = rate_scale rho^{k-1}; avoids overflow of P at large alpha dtau
    const double ea = std::exp(-q.a * g.dtau);
    double term = w.rate_scale() * ea;
    double sum = 0.0;
    for (int k = 1; k <= q.n; ++k) {
        sum += term;
        term *= w.decay * ea;
    }
    Amplification out;
    out.K = 2.0 * sum;
    const double s2 = p.sigma * p.sigma;
    const double sn = std::sin(0.5 * q.b * g.dy);
    const double diff = 2.0 * s2 / (g.dy * g.dy) * sn * sn;
    out.lambda = (out.K - diff - p.rate) / (out.K + diff + p.rate);
    const double sb = std::sin(q.b * g.dy);
    out.imaginary_residual = sb / g.dy * (p.rate - 0.5 * s2) +
                             sb * (q.xf_next - q.xf_curr) / (g.dy * g.dtau * q.xf_curr);
    return out;
}

namespace {

double log2_ratio(double coarse, double fine) {
    if (fine == 0.0) return INFINITY;
    return std::log2(std::abs(coarse / fine));
}

OrderSeries run_series(const ModelParams& p, const std::vector<GridSpec>& grids,
                       const SolverOptions& opts) {
    OrderSeries s;
    s.levels = parallel_map(grids, [&](const GridSpec& g) {
        auto run = run_solver(p, g, opts);
        OrderLevel lv;
        lv.nodes = g.nodes;
        lv.mu = g.mu;
        lv.dy = g.dy;
        lv.dtau = g.dtau;
        lv.steps = g.steps;
        lv.horizon = g.horizon();
        lv.price = price_at(run, p.strike);
        lv.xf = run.surface.xf(g.steps);
        lv.max_iterations = run.max_iterations();
        lv.denominator_warnings = run.denominator_warnings();
        return lv;
    });
    const auto& L = s.levels;
    for (std::size_t j = 0; j + 2 < L.size(); ++j) {
        s.price_orders.push_back(
            log2_ratio(L[j + 1].price - L[j].price, L[j + 2].price - L[j + 1].price));
        s.xf_orders.push_back(log2_ratio(L[j + 1].xf - L[j].xf, L[j + 2].xf - L[j + 1].xf));
    }
    const double ref = L.back().price;
    for (std::size_t j = 0; j + 2 < L.size(); ++j)
        s.price_orders_vs_finest.push_back(log2_ratio(L[j].price - ref, L[j + 1].price - ref));
    return s;
}

}  // namespace

double OrderSeries::price_order() const {
    return price_orders.empty() ? NAN : price_orders.back();
}

double OrderSeries::xf_order() const { return xf_orders.empty() ? NAN : xf_orders.back(); }

OrderSeries spatial_order(const ModelParams& p, const GridSpec& base, int refinements,
                          const SolverOptions& opts) {
    if (refinements < 2) throw DomainError("observed order needs at least two refinements");
    std::vector<GridSpec> grids;
    for (int j = 0; j <= refinements; ++j)
        grids.push_back(build_grid(p, base.nodes << j, base.mu, base.y_max));
    return run_series(p, grids, opts);
}

OrderSeries temporal_order(const ModelParams& p, const GridSpec& base, int refinements,
                           const SolverOptions& opts) {
    if (refinements < 2) throw DomainError("observed order needs at least two refinements");
    std::vector<GridSpec> grids;
    for (int j = 0; j <= refinements; ++j)
        grids.push_back(build_grid(p, base.nodes, base.mu / std::ldexp(1.0, j), base.y_max));
    return run_series(p, grids, opts);
}

OrderEstimate observed_order(const ModelParams& p, const GridSpec& base, int refinements,
                             const SolverOptions& opts) {
    return {spatial_order(p, base, refinements, opts), temporal_order(p, base, refinements, opts)};
}

std::vector<TruncationRow> y_truncation_study(const ModelParams& p, int nodes, double mu,
                                              const std::vector<double>& ys,
                                              TruncationMode mode, const SolverOptions& opts) {
    if (ys.empty()) return {};
    for (double y : ys)
        if (!(y > 0.0)) throw DomainError("every Y must be positive");
    const double y_min = *std::min_element(ys.begin(), ys.end());
    std::vector<GridSpec> grids;
    for (double y : ys) {
        int m = nodes;
        if (mode == TruncationMode::fixed_spacing)
            m = static_cast<int>(std::lround(nodes * y / y_min));
        grids.push_back(build_grid(p, m, mu, y));
    }
    return parallel_map(grids, [&](const GridSpec& g) {
        auto run = run_solver(p, g, opts);
        return TruncationRow{g.y_max,
                             g.nodes,
                             g.dy,
                             g.dtau,
                             g.steps,
                             run.surface.xf(g.steps),
                             price_at(run, p.strike),
                             run.max_iterations(),
                             run.denominator_warnings()};
    });
}

bool truncation_stabilizes(const std::vector<TruncationRow>& rows) {
    auto sorted = rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.y_max < b.y_max; });
    for (std::size_t j = 0; j + 2 < sorted.size(); ++j) {
        double d1 = std::abs(sorted[j + 1].xf - sorted[j].xf);
        double d2 = std::abs(sorted[j + 2].xf - sorted[j + 1].xf);
        if (!(d2 <= d1)) return false;
    }
    return true;
}

}  // namespace fronfix
