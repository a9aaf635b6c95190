#pragma once

#include <optional>
#include <string_view>

#include "fronfix/model.hpp"

namespace fronfix {

enum class OracleMethod { binomial, psor, european };

std::string_view to_string(OracleMethod m);

struct OraclePrice {
    double price = 0.0;
    OracleMethod method = OracleMethod::binomial;
    int resolution = 0;
    std::optional<double> boundary_estimate;  ///< X*(T) in currency units
};

/// Cox-Ross-Rubinstein tree with early exercise at every node. alpha is ignored.
OraclePrice binomial_american_put(const ModelParams& p, double s0, int steps);

struct PsorOptions {
    int space_nodes = 400;
    int time_steps = 400;
    double omega = 1.2;
    double tol = 1e-12;
    int max_sweeps = 10000;
    double s_max_factor = 4.0;  ///< S_max = factor * E
    /// fully implicit steps at the start to damp the payoff kink
    int implicit_startup = 2;
};

/// Crank-Nicolson in S with projected SOR onto max(E - S, 0) each sweep.
/// boundary_estimate is the largest S node below E where V equals the obstacle.
OraclePrice psor_american_put(const ModelParams& p, double s0, const PsorOptions& opts = {});

/// Same discretization without the projection.
OraclePrice european_cn_put(const ModelParams& p, double s0, const PsorOptions& opts = {});

/// Black-Scholes put.
double european_put_closed_form(const ModelParams& p, double s0);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace fronfix
