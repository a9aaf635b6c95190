#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fronfix {

/// Market and contract inputs plus the fractional order.
///
/// `alpha == 1` selects the classical (integer-order) time derivative.
struct ModelParams {
    double rate = 0.1;      ///< risk-free rate per year
    double sigma = 0.2;     ///< volatility per sqrt-year
    double strike = 1.0;    ///< E
    double maturity = 1.0;  ///< T, years
    double alpha = 1.0;     ///< fractional order in (0, 1]

    bool classical() const noexcept { return alpha == 1.0; }
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
    std::string message() const;
};

ValidationReport validate_params(const ModelParams& p);

/// Throws DomainError carrying every violation when `p` is invalid.
void require_valid(const ModelParams& p);

/// Uniform grid on [0, Y] x [0, N*dtau] with dtau = mu * dy^2.
struct GridSpec {
    double y_max = 0.0;  ///< truncation bound Y
    int nodes = 0;       ///< M, index of the far-field node
    double mu = 0.0;     ///< grid ratio dtau / dy^2
    double dy = 0.0;
    double dtau = 0.0;
    int steps = 0;       ///< N = ceil(T / dtau)

    double y(int m) const noexcept { return m * dy; }
    double tau(int n) const noexcept { return n * dtau; }
    /// N * dtau; may exceed T by less than one step.
    double horizon() const noexcept { return steps * dtau; }
};

/// Y = 4E, the usual far-field truncation.
double default_truncation(const ModelParams& p);

GridSpec build_grid(const ModelParams& p, int nodes, double mu, double y_max);

struct FixedDomainPoint {
    double y;
    double xf;
};

struct PhysicalPoint {
    double value;  ///< V = E v
    double asset;  ///< X = E xf e^y
};

/// Maps an asset price X >= X* onto the fixed domain: y = ln(X / X*),
/// xf = X* / E.
FixedDomainPoint to_fixed_domain(double asset, double boundary_price, double strike);

PhysicalPoint from_fixed_domain(double v, double y, double xf, double strike);

/// Price in the stopping region 0 <= X < E xf, where the put is exercised.
double stopping_region_value(double asset, double xf, double strike);

/// Dimensionless values v(tau^n, y_m) and the boundary path X_f(tau^n).
class SolutionSurface {
public:
    SolutionSurface() = default;
    SolutionSurface(int nodes, int steps);

    int nodes() const noexcept { return nodes_; }
    int steps() const noexcept { return steps_; }

    double v(int n, int m) const { return values_[index(n, m)]; }
    double& v(int n, int m) { return values_[index(n, m)]; }

    std::span<const double> level(int n) const;
    std::span<double> level(int n);

    std::span<const double> xf() const noexcept { return xf_; }
    double xf(int n) const { return xf_[static_cast<std::size_t>(n)]; }
    double& xf(int n) { return xf_[static_cast<std::size_t>(n)]; }

    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t index(int n, int m) const {
        return static_cast<std::size_t>(n) * static_cast<std::size_t>(nodes_ + 1) +
               static_cast<std::size_t>(m);
    }

    int nodes_ = 0;
    int steps_ = 0;
    std::vector<double> values_;
    std::vector<double> xf_;
};

}  // namespace fronfix
