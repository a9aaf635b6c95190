#include "fronfix/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fronfix/errors.hpp"

namespace fronfix {

std::string_view to_string(SchemeVariant v) {
    return v == SchemeVariant::published ? "published" : "consistent";
}

SchemeVariant parse_variant(std::string_view name) {
    if (name == "consistent") return SchemeVariant::consistent;
    if (name == "published") return SchemeVariant::published;
    throw DomainError("unknown scheme variant '" + std::string(name) + "'");
}

namespace {

// dtau alpha / (exp(alpha dtau / (1 - alpha)) - 1); dtau in classical mode.
double where_scale(double alpha, double dtau) {
    if (alpha == 1.0) return dtau;
    double e1 = std::expm1(alpha * dtau / (1.0 - alpha));
    return std::isinf(e1) ? 0.0 : dtau * alpha / e1;
}

struct BaseCoefficients {
    double a0, c0, b;
};

// Rate-free parts of the consistent rows, normalized by the CF rate scale.
BaseCoefficients consistent_base(const ModelParams& p, const GridSpec& g, const CFWeights& w) {
    const double th = w.operator_scale();
    const double s2 = p.sigma * p.sigma;
    const double diff = s2 / (4.0 * g.dy * g.dy);
    const double conv = (p.rate - 0.5 * s2) / (4.0 * g.dy);
    return {th * (diff + conv), th * (diff - conv), -0.5 * th * (s2 / (g.dy * g.dy) + p.rate)};
}

}  // namespace

SchemeCoefficients coefficients(const ModelParams& p, const GridSpec& g, double xf_next,
                                double xf_curr) {
    if (!(xf_curr > 0.0)) throw DomainError("xf_curr must be positive");
    const double q = where_scale(p.alpha, g.dtau);
    const double s2 = p.sigma * p.sigma;
    const double diff = s2 / (4.0 * g.dy * g.dy);
    const double conv = (p.rate - 0.5 * s2) / (4.0 * g.dy);
    const double vel = (xf_next - xf_curr) / (4.0 * g.dy * g.dtau * xf_curr);
    return {q * (diff + conv + vel), -0.5 * q * (s2 / (g.dy * g.dy) + p.rate),
            q * (diff - conv - vel)};
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys) {
    const std::size_t n = sys.size();
    if (sys.sub.size() != n || sys.super.size() != n || sys.rhs.size() != n)
        throw DomainError("tridiagonal bands differ in length");
    if (n == 0) return {};
    std::vector<double> cp(n), dp(n);
    double piv = sys.diag[0];
    if (!(std::abs(piv) > 1e-14)) throw SingularPivotError(0, piv);
    cp[0] = sys.super[0] / piv;
    dp[0] = sys.rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = sys.diag[i] - sys.sub[i] * cp[i - 1];
        if (!(std::abs(piv) > 1e-14)) throw SingularPivotError(i, piv);
        cp[i] = sys.super[i] / piv;
        dp[i] = (sys.rhs[i] - sys.sub[i] * dp[i - 1]) / piv;
    }
    std::vector<double> x(n);
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
}

StepState initial_state(const GridSpec& g, const CFWeights& w) {
    StepState s;
    s.n = 0;
    s.xf = 1.0;
    s.v.assign(static_cast<std::size_t>(g.nodes + 1), 0.0);
    s.history = HistoryAccumulator(s.v.size(), w.decay);
    s.front = HistoryAccumulator(1, w.decay);
    return s;
}

SchemeCoefficients step_coefficients(const ModelParams& p, const GridSpec& g,
                                     const CFWeights& w, const StepState& state,
                                     double xf_next, SchemeVariant variant) {
    if (variant == SchemeVariant::published) return coefficients(p, g, xf_next, state.xf);
    if (!(state.xf > 0.0)) throw DomainError("xf_curr must be positive");
    auto base = consistent_base(p, g, w);
    // CF rate of X_f at the new level, times operator_scale / (4 dy X_f^n)
    const double vel = (state.front.sum(0) + xf_next - state.xf) / (4.0 * g.dy * state.xf);
    return {base.a0 + vel, base.b, base.c0 - vel};
}

TridiagonalSystem assemble_step(const StepState& state, const SchemeCoefficients& c,
                                const CFWeights& w, double v0_next, SchemeVariant variant) {
    (void)w;
    const auto& v = state.v;
    const std::size_t M = v.size() - 1;
    const std::size_t n = M - 1;
    const bool fresh = variant == SchemeVariant::consistent;
    TridiagonalSystem sys;
    sys.sub.assign(n, c.C);
    sys.diag.assign(n, fresh ? c.B - 1.0 : c.B);
    sys.super.assign(n, c.A);
    sys.rhs.resize(n);
    for (std::size_t m = 1; m < M; ++m) {
        double r = state.history.sum(m) - (c.A * v[m + 1] + c.B * v[m] + c.C * v[m - 1]);
        if (fresh) r -= v[m];
        sys.rhs[m - 1] = r;
    }
    sys.rhs[0] -= c.C * v0_next;
    return sys;
}

double boundary_node_update(const StepState& state, double xf_next, const ModelParams& p,
                            const GridSpec& g, const CFWeights& w, SchemeVariant variant) {
    const double s2 = p.sigma * p.sigma;
    const double dy = g.dy;
    if (variant == SchemeVariant::consistent) {
        // Neumann condition and the y = 0 relation, both at the new level
        return (1.0 - xf_next) - dy * xf_next + dy * dy / s2 * (p.rate - 0.5 * s2 * xf_next);
    }
    const double cf = w.rate_scale() * state.front.scaled()[0];
    return -state.v[1] +
           2.0 * dy * dy / s2 *
               (cf + 0.5 * s2 * state.xf + (xf_next - state.xf) / g.dtau - p.rate) -
           (xf_next + state.xf) * (dy + 1.0) + 2.0;
}

FreeBoundaryUpdate free_boundary_update(const StepState& state, std::span<const double> v_iterate,
                                        const ModelParams& p, const GridSpec& g,
                                        const CFWeights& w, SchemeVariant variant) {
    const auto& v = state.v;
    if (v_iterate.size() != v.size()) throw DomainError("iterate length mismatch");
    const double s2 = p.sigma * p.sigma;
    const double dy = g.dy;
    const double x = state.xf;
    FreeBoundaryUpdate out;

    if (variant == SchemeVariant::consistent) {
        auto base = consistent_base(p, g, w);
        const double g0 = 1.0 + dy * dy * p.rate / s2;
        const double g1 = -1.0 - dy - 0.5 * dy * dy;
        const double kr = 1.0 / (4.0 * dy * x);
        const double sx = state.front.sum(0);
        const double up = v_iterate[2] + v[2];
        const double lo = v_iterate[0] + v[0];
        const double d = up - lo;
        const double num = base.a0 * up + base.c0 * lo + kr * (sx - x) * d +
                           (base.b - 1.0) * g0 + (base.b + 1.0) * v[1] - state.history.sum(1);
        const double t1 = kr * d;
        const double t2 = (base.b - 1.0) * g1;
        out.omega1 = -num;
        out.omega2 = t1 + t2;
        out.scale = std::max({1.0, std::abs(t1), std::abs(t2)});
    } else {
        const double dt = g.dtau;
        const double a = p.alpha;
        const double e1 = std::expm1(a * dt / (1.0 - a));
        const double lead = std::isinf(e1) ? 0.0 : dt / e1;
        const double cf = w.rate_scale() * state.front.scaled()[0];
        const double sum4 = v_iterate[2] + v_iterate[0] + v[2] + v[0];
        const double dif4 = v_iterate[2] - v_iterate[0] + v[2] - v[0];
        out.omega1 = state.history.sum(1) -
                     lead * (a * s2 / (4.0 * dy * dy) * sum4 +
                             (1.0 + p.rate * dy * dy / s2) * (cf + x / dt - p.rate) +
                             x * (dy + 1.0) + 2.0);
        const double half = 0.5 * a * lead;
        const double t1 = half * dif4 / (2.0 * dt * dy * x);
        const double t2 = -half * (s2 / (dy * dy) + p.rate) * (2.0 * dy * dy / (dt * s2) - 1.0);
        out.omega2 = t1 + t2;
        out.scale = std::max({1.0, std::abs(t1), std::abs(t2)});
    }

    const double floor = 1e-12 * out.scale;
    if (!(std::abs(out.omega2) >= floor))
        throw DenominatorNearZeroError(state.n + 1, out.omega2, floor);
    out.xf = out.omega1 / out.omega2;
    return out;
}

namespace {

struct Trial {
    std::vector<double> v;  // full level, v[0] = 1 - xf
    double solved_v1 = 0.0;
};

Trial solve_trial(const StepState& state, double xf, const ModelParams& p, const GridSpec& g,
                  const CFWeights& w, SchemeVariant variant) {
    auto c = step_coefficients(p, g, w, state, xf, variant);
    auto sys = assemble_step(state, c, w, 1.0 - xf, variant);
    auto sol = solve_tridiagonal(sys);
    Trial t;
    t.v.assign(state.v.size(), 0.0);
    t.v[0] = 1.0 - xf;
    std::copy(sol.begin(), sol.end(), t.v.begin() + 1);
    t.solved_v1 = t.v[1];
    if (variant == SchemeVariant::published)
        t.v[1] = boundary_node_update(state, xf, p, g, w, variant);
    return t;
}

}  // namespace

StepResult time_step(const StepState& state, const ModelParams& p, const GridSpec& g,
                     const CFWeights& w, const FixedPointOptions& opts,
                     SchemeVariant variant) {
    if (state.v.size() != static_cast<std::size_t>(g.nodes + 1))
        throw DomainError("state length does not match the grid");
    if (variant == SchemeVariant::published && w.classical)
        throw DomainError("the published variant needs alpha < 1");

    double xk = opts.initial_guess.value_or(state.xf);
    double x_prev = xk, r_prev = 0.0;
    double damping = opts.damping;
    bool converged = false;
    int iters = 0;
    FreeBoundaryUpdate fb;

    for (int k = 0; k < opts.max_iter; ++k) {
        iters = k + 1;
        auto trial = solve_trial(state, xk, p, g, w, variant);
        fb = free_boundary_update(state, trial.v, p, g, w, variant);
        const double res = fb.xf - xk;
        if (!std::isfinite(res)) break;
        if (std::abs(res) <= opts.tol_xf) {
            xk = fb.xf;
            converged = true;
            break;
        }
        double next = xk + damping * res;
        if (k > 0) {
            if (std::abs(res) >= std::abs(r_prev)) damping = opts.fallback_damping;
            next = xk + damping * res;
            if (opts.secant && res != r_prev) {
                double s = xk - res * (xk - x_prev) / (res - r_prev);
                if (std::isfinite(s) && s > 0.0 && s < 2.0) next = s;
            }
        }
        x_prev = xk;
        r_prev = res;
        xk = next;
    }
    if (!converged) throw NonConvergenceError(state.n + 1, iters, xk, x_prev);

    auto fin = solve_trial(state, xk, p, g, w, variant);
    StepResult out;
    auto& d = out.diagnostics;
    d.iterations = iters;
    d.omega2 = fb.omega2;
    d.denominator_warning = std::abs(fb.omega2) < 1e-6 * fb.scale;
    d.boundary_mismatch =
        std::abs(fin.solved_v1 - boundary_node_update(state, xk, p, g, w, variant));
    d.lagged_coefficients = coefficients(p, g, xk, state.xf);

    StepState& s = out.state;
    s.n = state.n + 1;
    s.xf = xk;
    s.v = std::move(fin.v);
    s.history = history_push(state.history, s.v, state.v);
    const double xn[1] = {xk};
    const double xo[1] = {state.xf};
    s.front = history_push(state.front, xn, xo);
    return out;
}

int SolverResult::max_iterations() const {
    int m = 0;
    for (const auto& s : steps) m = std::max(m, s.iterations);
    return m;
}

int SolverResult::denominator_warnings() const {
    return static_cast<int>(
        std::count_if(steps.begin(), steps.end(), [](const auto& s) { return s.denominator_warning; }));
}

SolverResult run_solver(const ModelParams& p, const GridSpec& g, const SolverOptions& opts) {
    require_valid(p);
    if (opts.variant == SchemeVariant::published && p.classical())
        throw DomainError("the published variant needs alpha < 1");
    const auto w = cf_weights(p.alpha, g.dtau);

    SolverResult res;
    res.params = p;
    res.grid = g;
    res.variant = opts.variant;
    res.surface = SolutionSurface(g.nodes, g.steps);
    res.steps.reserve(static_cast<std::size_t>(g.steps));

    auto state = initial_state(g, w);
    for (int n = 0; n < g.steps; ++n) {
        StepResult step;
        try {
            step = time_step(state, p, g, w, opts.fixed_point, opts.variant);
        } catch (const SingularPivotError& e) {
            throw NumericalError(std::string(e.what()) + " at step " + std::to_string(n + 1),
                                 n + 1);
        }
        state = std::move(step.state);
        res.steps.push_back(step.diagnostics);
        auto lvl = res.surface.level(n + 1);
        std::copy(state.v.begin(), state.v.end(), lvl.begin());
        res.surface.xf(n + 1) = state.xf;
    }
    return res;
}

SolverResult run_solver(const ModelParams& p, int nodes, double mu, double y_max,
                        const SolverOptions& opts) {
    require_valid(p);
    return run_solver(p, build_grid(p, nodes, mu, y_max), opts);
}

double price_at(const SolverResult& result, double asset, std::optional<int> level) {
    const int n = level.value_or(result.grid.steps);
    if (n < 0 || n > result.grid.steps) throw DomainError("level out of range");
    const double E = result.params.strike;
    const double xf = result.surface.xf(n);
    if (!(asset >= 0.0)) throw DomainError("asset price must be non-negative");
    if (asset < E * xf) return E - asset;
    const double y = std::log(asset / (E * xf));
    const auto& g = result.grid;
    if (y >= g.y_max) return 0.0;
    const double pos = y / g.dy;
    int m = static_cast<int>(std::floor(pos));
    m = std::clamp(m, 0, g.nodes - 1);
    const double t = pos - m;
    return E * ((1.0 - t) * result.surface.v(n, m) + t * result.surface.v(n, m + 1));
}

}  // namespace fronfix
