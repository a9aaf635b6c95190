#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fronfix/cf_kernel.hpp"
#include "fronfix/model.hpp"

namespace fronfix {

/// Which discrete equations the stepper solves.
///
/// `consistent` (default): the CF operator is evaluated at the new level
/// (its alpha -> 1 limit is the classical Crank-Nicolson row), the front
/// velocity in the convection term is the CF rate of X_f, and both boundary
/// relations at y = 0 are imposed at the new level.
///
/// `published`: the CF sum lags one level behind the step, the front velocity
/// is (X^{n+1} - X^n) / dtau, v^1 comes from the time-averaged boundary
/// relation and X_f^{n+1} = Omega1 / Omega2 exactly as printed. Fractional
/// orders only.
enum class SchemeVariant { consistent, published };

std::string_view to_string(SchemeVariant v);
SchemeVariant parse_variant(std::string_view name);

/// Tridiagonal coefficients of one scheme row:
///   A v^{m+1} + B v^m + C v^{m-1}
struct SchemeCoefficients {
    double A = 0.0;  ///< super-diagonal
    double B = 0.0;  ///< diagonal
    double C = 0.0;  ///< sub-diagonal
};

/// Lagged-history coefficients with Q = dtau alpha / (exp(alpha dtau / (1 - alpha)) - 1)
/// (Q = dtau in classical mode):
///   A = Q (sigma^2 / (4 dy^2) + (r - sigma^2/2) / (4 dy) + (xf_next - xf_curr) / (4 dy dtau xf_curr))
///   C = Q (sigma^2 / (4 dy^2) - (r - sigma^2/2) / (4 dy) - (xf_next - xf_curr) / (4 dy dtau xf_curr))
///   B = -Q/2 (sigma^2 / dy^2 + r)
SchemeCoefficients coefficients(const ModelParams& p, const GridSpec& g, double xf_next,
                                double xf_curr);

/// Bands of length M-1 for the unknowns v^1..v^{M-1}. `sub[0]` and
/// `super.back()` are outside the matrix and ignored.
struct TridiagonalSystem {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;
    std::vector<double> rhs;

    std::size_t size() const noexcept { return diag.size(); }
};

/// Thomas elimination. Throws SingularPivotError when a pivot falls to
/// 1e-14 in magnitude or below.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys);

/// Solver state at time level n.
struct StepState {
    int n = 0;
    double xf = 1.0;
    std::vector<double> v;        ///< length M+1; v[0] = 1 - xf, v[M] = 0
    HistoryAccumulator history;   ///< CF sums of v, one per node
    HistoryAccumulator front;     ///< CF sum of X_f (single node)
};

StepState initial_state(const GridSpec& g, const CFWeights& w);

/// Row coefficients actually used to advance `state` with trial boundary
/// `xf_next`. For `published` these equal coefficients(); for `consistent`
/// they are scaled by operator_scale() and carry the CF front rate.
SchemeCoefficients step_coefficients(const ModelParams& p, const GridSpec& g,
                                     const CFWeights& w, const StepState& state,
                                     double xf_next, SchemeVariant variant);

/// Interior rows m = 1..M-1 of the step n -> n+1 with v^0_{n+1} = v0_next and
/// v^M_{n+1} = 0 moved to the right-hand side.
TridiagonalSystem assemble_step(const StepState& state, const SchemeCoefficients& c,
                                const CFWeights& w, double v0_next, SchemeVariant variant);

/// v^1_{n+1} from the boundary relations at y = 0.
double boundary_node_update(const StepState& state, double xf_next, const ModelParams& p,
                            const GridSpec& g, const CFWeights& w, SchemeVariant variant);

struct FreeBoundaryUpdate {
    double xf = 0.0;
    double omega1 = 0.0;
    double omega2 = 0.0;
    double scale = 1.0;  ///< magnitude the denominator is compared against
};

/// X_f^{n+1} = Omega1 / Omega2 from row m = 1 with v^1_{n+1} eliminated
/// through the boundary relation and V^2_{n+1}, V^0_{n+1} taken from
/// `v_iterate`. Throws DenominatorNearZeroError when
/// |Omega2| < 1e-12 * max(1, |terms of Omega2|).
FreeBoundaryUpdate free_boundary_update(const StepState& state, std::span<const double> v_iterate,
                                        const ModelParams& p, const GridSpec& g,
                                        const CFWeights& w, SchemeVariant variant);

struct FixedPointOptions {
    int max_iter = 50;
    double tol_xf = 1e-10;
    double damping = 1.0;
    double fallback_damping = 0.5;
    bool secant = true;
    /// Starting trial boundary; X_f^n when unset.
    std::optional<double> initial_guess;
};

struct StepDiagnostics {
    int iterations = 0;
    double omega2 = 0.0;
    bool denominator_warning = false;  ///< |Omega2| within 1e-6 of its scale
    double boundary_mismatch = 0.0;    ///< |v^1 solved - v^1 from the boundary relation|
    SchemeCoefficients lagged_coefficients;    ///< coefficients() at the accepted boundary
};

struct StepResult {
    StepState state;
    StepDiagnostics diagnostics;
};

/// Advances one level: iterate the trial boundary through
/// {coefficients, assemble, solve, boundary relation, Omega1 / Omega2}
/// until successive boundaries agree to tol_xf, then push the history.
StepResult time_step(const StepState& state, const ModelParams& p, const GridSpec& g,
                     const CFWeights& w, const FixedPointOptions& opts,
                     SchemeVariant variant);

struct SolverOptions {
    SchemeVariant variant = SchemeVariant::consistent;
    FixedPointOptions fixed_point;
};

struct SolverResult {
    ModelParams params;
    GridSpec grid;
    SchemeVariant variant = SchemeVariant::consistent;
    SolutionSurface surface;
    std::vector<StepDiagnostics> steps;  ///< steps[n] describes n -> n+1

    int max_iterations() const;
    int denominator_warnings() const;
};

SolverResult run_solver(const ModelParams& p, const GridSpec& g, const SolverOptions& opts = {});
SolverResult run_solver(const ModelParams& p, int nodes, double mu, double y_max,
                        const SolverOptions& opts = {});

/// Option value V(S) at level n: linear interpolation in y on the grid,
/// intrinsic value E - S below the free boundary, 0 beyond Y.
double price_at(const SolverResult& result, double asset, std::optional<int> level = {});

}  // namespace fronfix
