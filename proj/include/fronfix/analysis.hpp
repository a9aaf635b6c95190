#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fronfix/model.hpp"
#include "fronfix/scheme.hpp"

namespace fronfix {

struct CoefficientSigns {
    int n = 0;  ///< step n -> n+1
    double A = 0.0, B = 0.0, C = 0.0;
};

/// Step-size conditions under which the lagged-history A and C are meant to be
/// non-negative:
///   dy <= sigma^2 dtau / |r - sigma^2/2|    (skipped when r = sigma^2/2)
///   dtau <= dy^2 / (r dy^2 + sigma^2)
/// Both are evaluated as written (boundary inclusive).
struct Lemma1Report {
    bool cond_convection = false;
    bool convection_skipped = false;
    bool cond_timestep = false;
    double convection_bound = 0.0;  ///< right side of the first inequality
    double timestep_bound = 0.0;    ///< right side of the second inequality
    std::vector<CoefficientSigns> coefficient_signs;
    int negative_A = 0;
    int negative_B = 0;
    int negative_C = 0;

    bool compliant() const noexcept { return cond_convection && cond_timestep; }
};

Lemma1Report lemma1_check(const ModelParams& p, const GridSpec& g);
/// Adds the observed lagged-history coefficient signs of every step in `run`.
Lemma1Report lemma1_check(const SolverResult& run);

enum class ViolationKind { xf_nonpositive, xf_increase, v_negative, v_increase_in_m };

std::string_view to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    int n = 0;
    int m = -1;  ///< -1 for boundary-path violations
    double amount = 0.0;
};

struct AuditReport {
    double tolerance = 1e-9;
    std::vector<Violation> violations;
    double max_xf_nonpositive = 0.0;
    double max_xf_increase = 0.0;
    double max_v_negative = 0.0;
    double max_v_increase = 0.0;

    bool ok() const noexcept { return violations.empty(); }
    int count(ViolationKind k) const;
};

/// Checks X_f > 0, X_f non-increasing in n, v >= 0 and v non-increasing in m
/// on every level, each with slack `tol`.
AuditReport monotonicity_audit(const SolutionSurface& s, double tol = 1e-9);

struct AmplificationQuery {
    ModelParams params;
    GridSpec grid;
    double b = 0.0;  ///< wavenumber
    double a = 0.0;  ///< temporal exponent of the Fourier ansatz
    int n = 1;       ///< history terms
    double xf_curr = 1.0;
    double xf_next = 1.0;
};

struct Amplification {
    double lambda = 0.0;
    double K = 0.0;
    /// sin(b dy)/dy (r - sigma^2/2) + sin(b dy)(X^{n+1} - X^n)/(dy dtau X^n)
    double imaginary_residual = 0.0;
};

/// lambda = (K - 2 sigma^2/dy^2 sin^2(b dy/2) - r) / (K + 2 sigma^2/dy^2 sin^2(b dy/2) + r)
/// with K = 2 (e^{alpha dtau/(1-alpha)} - 1)/(dtau alpha) sum_{k=1..n} e^{-k dtau (alpha/(1-alpha) + a)}.
Amplification amplification_factor(const AmplificationQuery& q);

struct OrderLevel {
    int nodes = 0;
    double mu = 0.0;
    double dy = 0.0;
    double dtau = 0.0;
    int steps = 0;
    double horizon = 0.0;
    double price = 0.0;  ///< V at S = E
    double xf = 0.0;     ///< X_f at the last level
    int max_iterations = 0;
    int denominator_warnings = 0;
};

struct OrderSeries {
    std::vector<OrderLevel> levels;
    /// log2 of successive-difference ratios; entry j uses levels j, j+1, j+2
    std::vector<double> price_orders;
    std::vector<double> xf_orders;
    /// log2 ratios of errors against the finest level
    std::vector<double> price_orders_vs_finest;

    double price_order() const;  ///< finest successive estimate
    double xf_order() const;
};

struct OrderEstimate {
    OrderSeries spatial;   ///< dy halved, mu fixed
    OrderSeries temporal;  ///< dy fixed, dtau halved
};

/// Nested runs from `base`: spatial halves dy with mu fixed, temporal keeps
/// M and halves mu. `refinements` >= 2 halvings each, so refinements + 1 grids.
OrderSeries spatial_order(const ModelParams& p, const GridSpec& base, int refinements,
                          const SolverOptions& opts = {});
OrderSeries temporal_order(const ModelParams& p, const GridSpec& base, int refinements,
                           const SolverOptions& opts = {});
OrderEstimate observed_order(const ModelParams& p, const GridSpec& base, int refinements,
                             const SolverOptions& opts = {});

struct TruncationRow {
    double y_max = 0.0;
    int nodes = 0;
    double dy = 0.0;
    double dtau = 0.0;
    int steps = 0;
    double xf = 0.0;
    double price = 0.0;
    int max_iterations = 0;
    int denominator_warnings = 0;
};

enum class TruncationMode {
    fixed_spacing,  ///< M scales with Y so dy is the same for every row
    fixed_nodes,    ///< M is the same for every row
};

/// X_f^N for each truncation bound. With fixed_spacing, `nodes` is the node
/// count at the smallest Y.
std::vector<TruncationRow> y_truncation_study(const ModelParams& p, int nodes, double mu,
                                              const std::vector<double>& ys,
                                              TruncationMode mode = TruncationMode::fixed_spacing,
                                              const SolverOptions& opts = {});

/// |X(4) - X(2)| <= |X(2) - X(1)| for consecutive rows sorted by Y.
bool truncation_stabilizes(const std::vector<TruncationRow>& rows);

}  // namespace fronfix
