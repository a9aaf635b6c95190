#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fronfix {

/// Weights of the discrete Caputo-Fabrizio derivative
///
///   D v(t_n) = P * sum_{k=1..n} (v^{n+1-k} - v^{n-k}) rho^k
///
/// with rho = exp(-alpha dtau / (1 - alpha)) and
/// P = (exp(alpha dtau / (1 - alpha)) - 1) / (dtau alpha).
///
/// P overflows long before P * rho does, so the scheme works with
/// `rate_scale() = P * rho = (1 - rho) / (dtau alpha)`, the weight of the
/// newest increment. In classical mode (alpha = 1) rho = 0 and the rate
/// scale is 1 / dtau, which is the analytic limit.
struct CFWeights {
    double alpha = 1.0;
    double dtau = 0.0;
    double decay = 0.0;      ///< rho
    double prefactor = 0.0;  ///< P; +inf when exp overflows
    bool classical = true;

    /// rho^k
    double weight(int k) const;
    double rate_scale() const noexcept { return rate_scale_; }
    /// 1 / rate_scale(): dtau alpha / (1 - rho), or dtau when classical.
    double operator_scale() const noexcept { return 1.0 / rate_scale_; }

    double rate_scale_ = 0.0;
};

CFWeights cf_weights(double alpha, double dtau);

/// Direct O(n) evaluation of sum_{k=1..n} (v^{n+1-k} - v^{n-k}) rho^k over a
/// single-node series v^0..v^n. Requires n >= 1.
double history_sum_naive(std::span<const double> series, const CFWeights& w);

/// Per-node running CF sums, updated in O(1) per node and step.
///
/// Internally the sums are stored divided by rho, so the newest increment
/// carries unit weight and nothing underflows when rho is tiny:
///   scaled_n = (v^n - v^{n-1}) + rho * scaled_{n-1},   sum_n = rho * scaled_n.
class HistoryAccumulator {
public:
    HistoryAccumulator() = default;
    HistoryAccumulator(std::size_t nodes, double decay);

    std::size_t size() const noexcept { return scaled_.size(); }
    int level() const noexcept { return level_; }
    double decay() const noexcept { return decay_; }

    /// sum_{k=1..n} (v^{n+1-k} - v^{n-k}) rho^k at node m.
    double sum(std::size_t m) const { return decay_ * scaled_[m]; }
    std::span<const double> scaled() const noexcept { return scaled_; }

    void push(std::span<const double> v_new, std::span<const double> v_prev);

private:
    std::vector<double> scaled_;
    double decay_ = 0.0;
    int level_ = 0;
};

/// Returns `acc` advanced by one level: S_new = rho (S_old + v_new - v_prev).
HistoryAccumulator history_push(HistoryAccumulator acc, std::span<const double> v_new,
                                std::span<const double> v_prev);

/// Discrete CF derivative P * S[m] at every node. Classical mode gives the
/// backward difference (v^n - v^{n-1}) / dtau.
std::vector<double> cf_derivative_apply(const HistoryAccumulator& acc, const CFWeights& w);

}  // namespace fronfix
