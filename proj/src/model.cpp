#include "fronfix/model.hpp"

#include <cmath>
#include <sstream>

#include "fronfix/errors.hpp"

namespace fronfix {

std::string ValidationReport::message() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

ValidationReport validate_params(const ModelParams& p) {
    ValidationReport rep;
    auto check = [&](bool ok, const char* msg) {
        if (!ok) rep.violations.emplace_back(msg);
    };
    check(std::isfinite(p.rate) && p.rate >= 0.0, "r must be non-negative");
    check(std::isfinite(p.sigma) && p.sigma > 0.0, "sigma must be positive");
    check(std::isfinite(p.strike) && p.strike > 0.0, "E must be positive");
    check(std::isfinite(p.maturity) && p.maturity > 0.0, "T must be positive");
    check(p.alpha > 0.0 && p.alpha <= 1.0, "alpha must lie in (0,1]");
    return rep;
}

void require_valid(const ModelParams& p) {
    auto rep = validate_params(p);
    if (!rep.ok()) throw DomainError(rep.message());
}

double default_truncation(const ModelParams& p) { return 4.0 * p.strike; }

GridSpec build_grid(const ModelParams& p, int nodes, double mu, double y_max) {
    if (nodes < 4) throw DomainError("M must be at least 4");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mu must be positive");
    if (!(y_max > 0.0) || !std::isfinite(y_max)) throw DomainError("Y must be positive");
    if (!(p.maturity > 0.0)) throw DomainError("T must be positive");

    GridSpec g;
    g.y_max = y_max;
    g.nodes = nodes;
    g.mu = mu;
    g.dy = y_max / nodes;
    g.dtau = mu * g.dy * g.dy;
    // slack keeps ratios like 1/0.008 from rounding up a whole step
    double ratio = p.maturity / g.dtau;
    g.steps = static_cast<int>(std::ceil(ratio * (1.0 - 1e-12) - 1e-9));
    if (g.steps < 1) g.steps = 1;
    return g;
}

FixedDomainPoint to_fixed_domain(double asset, double boundary_price, double strike) {
    if (!(boundary_price > 0.0) || !(strike > 0.0))
        throw DomainError("boundary price and strike must be positive");
    if (!(asset >= boundary_price))
        throw DomainError("asset price lies below the free boundary");
    return {std::log(asset / boundary_price), boundary_price / strike};
}

PhysicalPoint from_fixed_domain(double v, double y, double xf, double strike) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("v must lie in [0,1]");
    if (!(xf > 0.0 && xf <= 1.0)) throw DomainError("xf must lie in (0,1]");
    if (!(y >= 0.0)) throw DomainError("y must be non-negative");
    if (!(strike > 0.0)) throw DomainError("E must be positive");
    return {strike * v, strike * xf * std::exp(y)};
}

double stopping_region_value(double asset, double xf, double strike) {
    if (!(asset >= 0.0) || !(strike > 0.0)) throw DomainError("bad stopping-region input");
    if (asset >= strike * xf) throw DomainError("asset price is in the continuation region");
    return strike - asset;
}

SolutionSurface::SolutionSurface(int nodes, int steps)
    : nodes_(nodes),
      steps_(steps),
      values_(static_cast<std::size_t>(steps + 1) * static_cast<std::size_t>(nodes + 1), 0.0),
      xf_(static_cast<std::size_t>(steps + 1), 1.0) {
    if (nodes < 1 || steps < 0) throw DomainError("bad surface shape");
}

std::span<const double> SolutionSurface::level(int n) const {
    return std::span<const double>(values_).subspan(index(n, 0),
                                                    static_cast<std::size_t>(nodes_ + 1));
}

std::span<double> SolutionSurface::level(int n) {
    return std::span<double>(values_).subspan(index(n, 0), static_cast<std::size_t>(nodes_ + 1));
}

}  // namespace fronfix
