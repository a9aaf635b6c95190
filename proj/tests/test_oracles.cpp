#include <doctest.h>

#include <cmath>
#include <random>

#include "fronfix/errors.hpp"
#include "fronfix/oracles.hpp"
#include "fronfix/scheme.hpp"

using namespace fronfix;

namespace {

// e^{-rT} E[(E - S_T)^+] by composite Simpson on the Gaussian variable
double european_by_quadrature(const ModelParams& p, double s0) {
    const double vt = p.sigma * std::sqrt(p.maturity);
    const double drift = (p.rate - 0.5 * p.sigma * p.sigma) * p.maturity;
    const double zc = (std::log(p.strike / s0) - drift) / vt;
    const double lo = std::min(zc, -12.0) - 1.0;
    const int n = 200000;
    const double h = (zc - lo) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        double z = lo + i * h;
        double f = (p.strike - s0 * std::exp(drift + vt * z)) * std::exp(-0.5 * z * z);
        s += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    return std::exp(-p.rate * p.maturity) * s * h / 3.0 / std::sqrt(2.0 * M_PI);
}

}  // namespace

TEST_CASE("normal_cdf") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
    CHECK(normal_cdf(-3.0) == doctest::Approx(0.0013498980316300946).epsilon(1e-13));
    CHECK(normal_cdf(-10.0) == doctest::Approx(7.6198530241604696e-24).epsilon(1e-12));
}

TEST_CASE("european closed form") {
    ModelParams p;
    double v = european_put_closed_form(p, 1.0);
    CHECK(v == doctest::Approx(0.0375).epsilon(5e-4 / 0.0375));
    CHECK(v == doctest::Approx(european_by_quadrature(p, 1.0)).epsilon(1e-9));

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ur(0.0, 0.2), us(0.05, 0.6), uS(0.5, 1.6), uT(0.1, 3.0);
    for (int i = 0; i < 20; ++i) {
        ModelParams q{ur(rng), us(rng), 1.0, uT(rng), 1.0};
        double s = uS(rng);
        CHECK(european_put_closed_form(q, s) ==
              doctest::Approx(european_by_quadrature(q, s)).epsilon(1e-8));
    }

    ModelParams flat = p;
    flat.sigma = 1e-9;
    CHECK(european_put_closed_form(flat, 0.5) == doctest::Approx(std::exp(-0.1) - 0.5).epsilon(1e-12));
    CHECK(european_put_closed_form(p, 1e6) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(european_put_closed_form(p, 50.0) < 1e-50);
}

TEST_CASE("binomial tree") {
    ModelParams p;
    p.maturity = 1e-10;
    CHECK(binomial_american_put(p, 0.8, 1).price == doctest::Approx(0.2).epsilon(1e-8));
    CHECK(binomial_american_put(p, 1.3, 1).price == doctest::Approx(0.0).epsilon(1e-12));

    ModelParams z;
    z.rate = 0.0;
    CHECK(binomial_american_put(z, 1.0, 800).price >= european_put_closed_form(z, 1.0) - 1e-3);

    ModelParams ref;
    auto a = binomial_american_put(ref, 1.0, 5000);
    auto b = binomial_american_put(ref, 1.0, 10000);
    CHECK(std::abs(a.price - b.price) <= 1e-4);
    CHECK(a.price == doctest::Approx(0.048161).epsilon(1e-4 / 0.048));
    CHECK(a.resolution == 5000);
    CHECK(a.method == OracleMethod::binomial);
    CHECK_THROWS_AS(binomial_american_put(ref, 1.0, 0), DomainError);
    CHECK_THROWS_AS(binomial_american_put(ref, -1.0, 10), DomainError);
}

TEST_CASE("binomial self-convergence on random draws") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ur(0.01, 0.15), us(0.1, 0.5), uS(0.7, 1.3);
    for (int i = 0; i < 8; ++i) {
        ModelParams p{ur(rng), us(rng), 1.0, 1.0, 1.0};
        double s = uS(rng);
        double coarse = std::abs(binomial_american_put(p, s, 100).price -
                                 binomial_american_put(p, s, 50).price);
        double fine = std::abs(binomial_american_put(p, s, 3200).price -
                               binomial_american_put(p, s, 1600).price);
        // deep in the money both differences can be exactly zero
        CHECK(fine <= coarse);
    }
}

TEST_CASE("psor agrees with the European solve when exercise never pays") {
    ModelParams p;
    p.rate = 0.0;
    PsorOptions o;
    for (double s : {1.5, 2.0, 3.0}) {
        auto am = psor_american_put(p, s, o);
        auto eu = european_cn_put(p, s, o);
        CHECK(std::abs(am.price - eu.price) <= 1e-6);
    }
    CHECK(european_cn_put(p, 1.0, o).price ==
          doctest::Approx(european_put_closed_form(p, 1.0)).epsilon(1e-3));
}

TEST_CASE("psor against the tree and the front-fixing boundary") {
    ModelParams p;
    PsorOptions o;
    auto ps = psor_american_put(p, 1.0, o);
    auto tree = binomial_american_put(p, 1.0, 5000);
    CHECK(std::abs(ps.price - tree.price) <= 2e-3);
    REQUIRE(ps.boundary_estimate.has_value());
    auto run = run_solver(p, 200, 20.0, 4.0);
    const double cell = o.s_max_factor * p.strike / o.space_nodes;
    CHECK(std::abs(*ps.boundary_estimate - run.surface.xf(run.grid.steps)) <= 2 * cell);

    PsorOptions bad = o;
    bad.omega = 2.0;
    CHECK_THROWS_AS(psor_american_put(p, 1.0, bad), DomainError);
    PsorOptions few = o;
    few.max_sweeps = 1;
    CHECK_THROWS_AS(psor_american_put(p, 1.0, few), NumericalError);
}

TEST_CASE("ordering chain on random draws") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ur(0.0, 0.15), us(0.1, 0.5), uS(0.6, 1.5), uT(0.25, 2.0);
    for (int i = 0; i < 10; ++i) {
        ModelParams p{ur(rng), us(rng), 1.0, uT(rng), 1.0};
        double s = uS(rng);
        double eu = european_put_closed_form(p, s);
        double bin = binomial_american_put(p, s, 2000).price;
        PsorOptions o;
        o.space_nodes = 400;
        o.time_steps = 400;
        double ps = psor_american_put(p, s, o).price;
        CHECK(eu >= 0.0);
        CHECK(bin >= eu - 1e-3);
        CHECK(bin >= std::max(1.0 - s, 0.0) - 1e-12);
        CHECK(ps >= std::max(1.0 - s, 0.0) - 1e-12);
        CHECK(std::abs(ps - bin) <= 2e-3);
    }
}
