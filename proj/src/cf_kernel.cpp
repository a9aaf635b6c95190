#include "fronfix/cf_kernel.hpp"

#include <cmath>

#include "fronfix/errors.hpp"

namespace fronfix {

double CFWeights::weight(int k) const {
    if (k < 1) throw DomainError("weight index must be >= 1");
    return std::pow(decay, k);
}

CFWeights cf_weights(double alpha, double dtau) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
    if (!(dtau > 0.0) || !std::isfinite(dtau)) throw DomainError("dtau must be positive");

    CFWeights w;
    w.alpha = alpha;
    w.dtau = dtau;
    if (alpha == 1.0) {
        w.classical = true;
        w.decay = 0.0;
        w.prefactor = 1.0 / dtau;
        w.rate_scale_ = 1.0 / dtau;
        return w;
    }
    w.classical = false;
    double x = alpha * dtau / (1.0 - alpha);
    w.decay = std::exp(-x);
    w.prefactor = std::expm1(x) / (dtau * alpha);
    w.rate_scale_ = -std::expm1(-x) / (dtau * alpha);
    return w;
}

double history_sum_naive(std::span<const double> series, const CFWeights& w) {
    if (series.size() < 2) throw DomainError("history sum needs at least two levels");
    const std::size_t n = series.size() - 1;
    double s = 0.0;
    double rk = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        rk *= w.decay;
        s += (series[n + 1 - k] - series[n - k]) * rk;
    }
    return s;
}

HistoryAccumulator::HistoryAccumulator(std::size_t nodes, double decay)
    : scaled_(nodes, 0.0), decay_(decay) {}

void HistoryAccumulator::push(std::span<const double> v_new, std::span<const double> v_prev) {
    if (v_new.size() != scaled_.size() || v_prev.size() != scaled_.size())
        throw DomainError("history push length mismatch");
    for (std::size_t m = 0; m < scaled_.size(); ++m)
        scaled_[m] = (v_new[m] - v_prev[m]) + decay_ * scaled_[m];
    ++level_;
}

HistoryAccumulator history_push(HistoryAccumulator acc, std::span<const double> v_new,
                                std::span<const double> v_prev) {
    acc.push(v_new, v_prev);
    return acc;
}

std::vector<double> cf_derivative_apply(const HistoryAccumulator& acc, const CFWeights& w) {
    if (acc.level() < 1) throw DomainError("derivative needs at least one pushed level");
    std::vector<double> out(acc.size());
    auto s = acc.scaled();
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = w.rate_scale() * s[m];
    return out;
}

}  // namespace fronfix
