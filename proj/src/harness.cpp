#include "fronfix/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "fronfix/errors.hpp"
#include "fronfix/oracles.hpp"
#include "fronfix/parallel.hpp"

namespace fronfix {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::solve: return "solve";
        case Mode::truncation_study: return "truncation-study";
        case Mode::order_study: return "order-study";
        case Mode::stability_scan: return "stability-scan";
        case Mode::oracle_compare: return "oracle-compare";
    }
    return "unknown";
}

Mode parse_mode(std::string_view name) {
    for (Mode m : {Mode::solve, Mode::truncation_study, Mode::order_study, Mode::stability_scan,
                   Mode::oracle_compare})
        if (to_string(m) == name) return m;
    throw DomainError("unknown mode '" + std::string(name) + "'");
}

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw DomainError("cannot parse number '" + item + "'");
        }
        if (used != item.size()) throw DomainError("cannot parse number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw DomainError("empty list");
    return out;
}

TruncationMode parse_truncation(const std::string& s) {
    if (s == "spacing") return TruncationMode::fixed_spacing;
    if (s == "nodes") return TruncationMode::fixed_nodes;
    throw DomainError("truncation must be 'spacing' or 'nodes'");
}

std::vector<double> json_list(const json& v) {
    if (v.is_array()) return v.get<std::vector<double>>();
    if (v.is_string()) return parse_list(v.get<std::string>());
    return {v.get<double>()};
}

}  // namespace

void apply_config_json(ExperimentConfig& cfg, const json& j) {
    if (!j.is_object()) throw DomainError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        const auto& v = it.value();
        if (k == "mode") cfg.mode = parse_mode(v.get<std::string>());
        else if (k == "r") cfg.params.rate = v.get<double>();
        else if (k == "sigma") cfg.params.sigma = v.get<double>();
        else if (k == "E") cfg.params.strike = v.get<double>();
        else if (k == "T") cfg.params.maturity = v.get<double>();
        else if (k == "alpha") cfg.params.alpha = v.get<double>();
        else if (k == "M") cfg.nodes = v.get<int>();
        else if (k == "mu") cfg.mu = v.get<double>();
        else if (k == "Y") cfg.ys = json_list(v);
        else if (k == "variant") cfg.variant = parse_variant(v.get<std::string>());
        else if (k == "truncation") cfg.truncation = parse_truncation(v.get<std::string>());
        else if (k == "refinements") cfg.refinements = v.get<int>();
        else if (k == "binomial_steps") cfg.binomial_steps = v.get<int>();
        else if (k == "psor_nodes") cfg.psor_nodes = v.get<int>();
        else if (k == "psor_steps") cfg.psor_steps = v.get<int>();
        else if (k == "samples") cfg.random_samples = v.get<int>();
        else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
        else if (k == "out") cfg.output_dir = v.get<std::string>();
        else if (k == "scan_alphas") cfg.scan_alphas = json_list(v);
        else if (k == "scan_as") cfg.scan_as = json_list(v);
        else if (k == "scan_ns") cfg.scan_ns = v.get<std::vector<int>>();
        else if (k == "scan_wavenumbers") cfg.scan_wavenumbers = v.get<int>();
        else throw DomainError("unknown config key '" + k + "'");
    }
}

void validate_config(const ExperimentConfig& cfg) {
    require_valid(cfg.params);
    if (cfg.ys.empty()) throw DomainError("Y is required");
    if (cfg.mode != Mode::truncation_study && cfg.ys.size() != 1)
        throw DomainError("Y takes a single value outside truncation-study");
    for (double y : cfg.ys)
        if (!(y > 0.0)) throw DomainError("Y must be positive");
    if (cfg.nodes < 4) throw DomainError("M must be at least 4");
    if (!(cfg.mu > 0.0)) throw DomainError("mu must be positive");
    if (cfg.variant == SchemeVariant::published && cfg.params.classical())
        throw DomainError("the published variant needs alpha < 1");
    if (cfg.mode == Mode::order_study && cfg.refinements < 2)
        throw DomainError("order-study needs at least 2 refinements");
    if (cfg.mode == Mode::oracle_compare &&
        (cfg.binomial_steps < 1 || cfg.psor_nodes < 4 || cfg.psor_steps < 1))
        throw DomainError("oracle resolutions must be positive");
    if (cfg.mode == Mode::stability_scan) {
        if (cfg.scan_wavenumbers < 1) throw DomainError("scan needs at least one wavenumber");
        for (double a : cfg.scan_alphas)
            if (!(a > 0.0 && a <= 1.0)) throw DomainError("scan alpha must lie in (0,1]");
        for (double a : cfg.scan_as)
            if (a == 0.0) throw DomainError("scan exponent a must be nonzero");
        for (int n : cfg.scan_ns)
            if (n < 1) throw DomainError("scan history length must be >= 1");
        if (cfg.random_samples < 0) throw DomainError("samples must be non-negative");
    }
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvTable boundary_table(const SolverResult& run) {
    CsvTable t;
    t.header = {"n", "tau", "xf", "Xstar"};
    const auto& g = run.grid;
    for (int n = 0; n <= g.steps; ++n) {
        double xf = run.surface.xf(n);
        t.rows.push_back({double(n), g.tau(n), xf, run.params.strike * xf});
    }
    return t;
}

CsvTable surface_table(const SolverResult& run) {
    CsvTable t;
    t.header = {"n", "m", "y", "v", "V"};
    const auto& g = run.grid;
    t.rows.reserve(static_cast<std::size_t>(g.steps + 1) * static_cast<std::size_t>(g.nodes + 1));
    for (int n = 0; n <= g.steps; ++n)
        for (int m = 0; m <= g.nodes; ++m) {
            double v = run.surface.v(n, m);
            t.rows.push_back({double(n), double(m), g.y(m), v, run.params.strike * v});
        }
    return t;
}

void emit_csv(const CsvTable& table, const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < table.header.size(); ++i)
        os << (i ? "," : "") << table.header[i];
    os << '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        bool first = true;
        if (!table.labels.empty()) {
            os << table.labels[r];
            first = false;
        }
        for (double x : table.rows[r]) {
            if (!first) os << ',';
            os << format_number(x);
            first = false;
        }
        os << '\n';
    }
    if (!os) throw Error("write failed for " + path.string());
}

std::string render_svg(const SolverResult& run) {
    const auto& g = run.grid;
    const auto& s = run.surface;
    const double E = run.params.strike;
    const double W = 360, H = 260, pad = 40;
    std::ostringstream os;
    os.precision(6);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * W + 3 * pad
       << "\" height=\"" << H + 2 * pad << "\">\n";

    // free-boundary path
    double lo = 1.0;
    for (int n = 0; n <= g.steps; ++n) lo = std::min(lo, s.xf(n));
    double span = std::max(1.0 - lo, 1e-12);
    double t_end = std::max(g.horizon(), 1e-300);
    os << "<g id=\"boundary\" data-ymin=\"" << lo << "\" data-ymax=\"1\">\n"
       << "<text x=\"" << pad << "\" y=\"" << pad - 10 << "\">X_f(tau)</text>\n"
       << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W << "\" height=\"" << H
       << "\" fill=\"none\" stroke=\"black\"/>\n"
       << "<polyline id=\"boundary-path\" fill=\"none\" stroke=\"steelblue\" points=\"";
    for (int n = 0; n <= g.steps; ++n) {
        double x = pad + W * g.tau(n) / t_end;
        double y = pad + H * (1.0 - (s.xf(n) - lo) / span);
        os << (n ? " " : "") << x << ',' << y;
    }
    os << "\"/>\n</g>\n";

    // value profile at the last level over [0, E xf e^Y]
    const int N = g.steps;
    const double xf = s.xf(N);
    const double x_max = E * xf * std::exp(g.y_max);
    const double x_plot = std::min(x_max, 2.0 * E);
    const double ox = 2 * pad + W;
    os << "<g id=\"profile\">\n"
       << "<text x=\"" << ox << "\" y=\"" << pad - 10 << "\">V(X, T)</text>\n"
       << "<rect x=\"" << ox << "\" y=\"" << pad << "\" width=\"" << W << "\" height=\"" << H
       << "\" fill=\"none\" stroke=\"black\"/>\n"
       << "<polyline id=\"value-profile\" fill=\"none\" stroke=\"firebrick\" points=\""
       << ox << ',' << pad << ' ' << ox + W * E * xf / x_plot << ','
       << pad + H * (1.0 - (1.0 - xf));
    for (int m = 0; m <= g.nodes; ++m) {
        double X = E * xf * std::exp(g.y(m));
        if (X > x_plot) break;
        os << ' ' << ox + W * X / x_plot << ',' << pad + H * (1.0 - s.v(N, m));
    }
    os << "\"/>\n</g>\n</svg>\n";
    return os.str();
}

void emit_plot_script(const SolverResult& run, const fs::path& dir) {
    {
        std::ofstream os(dir / "plot.svg", std::ios::binary);
        if (!os) throw Error("cannot write plot.svg");
        os << render_svg(run);
    }
    std::ofstream gp(dir / "plot.gp", std::ios::binary);
    if (!gp) throw Error("cannot write plot.gp");
    gp << "# gnuplot plot.gp\n"
       << "set datafile separator ','\n"
       << "set terminal pngcairo size 1000,400\n"
       << "set output 'plot.png'\n"
       << "set multiplot layout 1,2\n"
       << "set xlabel 'tau'; set ylabel 'X_f'\n"
       << "plot 'boundary.csv' every ::1 using 2:3 with lines title 'free boundary'\n"
       << "set xlabel 'y'; set ylabel 'v'\n"
       << "plot 'surface.csv' every ::1 using ($1==" << run.grid.steps
       << " ? $3 : 1/0):4 with lines title 'v(T, y)'\n"
       << "unset multiplot\n";
}

namespace {

json lemma1_json(const Lemma1Report& r) {
    return {{"cond_convection", r.cond_convection},
            {"convection_skipped", r.convection_skipped},
            {"cond_timestep", r.cond_timestep},
            {"convection_bound", r.convection_skipped ? json(nullptr) : json(r.convection_bound)},
            {"timestep_bound", r.timestep_bound},
            {"compliant", r.compliant()},
            {"negative_A_steps", r.negative_A},
            {"negative_B_steps", r.negative_B},
            {"negative_C_steps", r.negative_C}};
}

json params_json(const ModelParams& p) {
    return {{"r", p.rate}, {"sigma", p.sigma}, {"E", p.strike}, {"T", p.maturity}, {"alpha", p.alpha}};
}

json grid_json(const GridSpec& g) {
    return {{"Y", g.y_max}, {"M", g.nodes}, {"mu", g.mu}, {"dy", g.dy},
            {"dtau", g.dtau}, {"N", g.steps}, {"horizon", g.horizon()}};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw DomainError("output directory " + dir.string() + " is not usable");
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

}  // namespace

json run_summary(const SolverResult& run) {
    const auto& g = run.grid;
    json warn = json::array();
    for (std::size_t n = 0; n < run.steps.size(); ++n)
        if (run.steps[n].denominator_warning)
            warn.push_back({{"step", n + 1}, {"omega2", run.steps[n].omega2}});
    double mismatch = 0.0;
    for (const auto& s : run.steps) mismatch = std::max(mismatch, s.boundary_mismatch);
    auto audit = monotonicity_audit(run.surface);
    const int N = g.steps;
    return {{"params", params_json(run.params)},
            {"grid", grid_json(g)},
            {"variant", std::string(to_string(run.variant))},
            {"T", run.params.maturity},
            {"horizon", g.horizon()},
            {"lemma1", lemma1_json(lemma1_check(run))},
            {"max_iterations", run.max_iterations()},
            {"denominator_warnings", warn},
            {"max_boundary_mismatch", mismatch},
            {"xf_N", run.surface.xf(N)},
            {"boundary_price", run.params.strike * run.surface.xf(N)},
            {"price_at_strike", price_at(run, run.params.strike)},
            {"audit",
             {{"violations", audit.violations.size()},
              {"max_xf_increase", audit.max_xf_increase},
              {"max_v_negative", audit.max_v_negative},
              {"max_v_increase", audit.max_v_increase}}}};
}

namespace {

SolverOptions solver_options(const ExperimentConfig& cfg) {
    SolverOptions o;
    o.variant = cfg.variant;
    return o;
}

json solve_mode(const ExperimentConfig& cfg, std::ostream& log) {
    auto run = run_solver(cfg.params, cfg.nodes, cfg.mu, cfg.y_max(), solver_options(cfg));
    emit_csv(boundary_table(run), cfg.output_dir / "boundary.csv");
    emit_csv(surface_table(run), cfg.output_dir / "surface.csv");
    emit_plot_script(run, cfg.output_dir);
    auto j = run_summary(run);
    log << "price at S=E: " << format_number(j["price_at_strike"].get<double>())
        << "  X_f(N): " << format_number(j["xf_N"].get<double>()) << '\n';
    return j;
}

json truncation_mode(const ExperimentConfig& cfg, std::ostream& log) {
    auto rows = y_truncation_study(cfg.params, cfg.nodes, cfg.mu, cfg.ys, cfg.truncation,
                                   solver_options(cfg));
    CsvTable t;
    t.header = {"Y", "M", "dy", "dtau", "N", "xf_N", "price"};
    json jr = json::array();
    for (const auto& r : rows) {
        t.rows.push_back({r.y_max, double(r.nodes), r.dy, r.dtau, double(r.steps), r.xf, r.price});
        jr.push_back({{"Y", r.y_max}, {"M", r.nodes}, {"N", r.steps}, {"horizon", r.steps * r.dtau},
                      {"xf_N", r.xf}, {"price", r.price}, {"max_iterations", r.max_iterations},
                      {"denominator_warnings", r.denominator_warnings}});
        log << "Y=" << format_number(r.y_max) << " M=" << r.nodes
            << " X_f(N)=" << format_number(r.xf) << '\n';
    }
    emit_csv(t, cfg.output_dir / "truncation.csv");
    return {{"rows", jr},
            {"truncation", cfg.truncation == TruncationMode::fixed_spacing ? "spacing" : "nodes"},
            {"stabilizes", truncation_stabilizes(rows)}};
}

json series_json(const OrderSeries& s) {
    json lv = json::array();
    for (const auto& l : s.levels)
        lv.push_back({{"M", l.nodes}, {"mu", l.mu}, {"dy", l.dy}, {"dtau", l.dtau}, {"N", l.steps},
                      {"horizon", l.horizon}, {"price", l.price}, {"xf_N", l.xf},
                      {"max_iterations", l.max_iterations},
                      {"denominator_warnings", l.denominator_warnings}});
    return {{"levels", lv},
            {"price_orders", s.price_orders},
            {"xf_orders", s.xf_orders},
            {"price_orders_vs_finest", s.price_orders_vs_finest},
            {"price_order", s.price_order()},
            {"xf_order", s.xf_order()}};
}

json order_mode(const ExperimentConfig& cfg, std::ostream& log) {
    auto base = build_grid(cfg.params, cfg.nodes, cfg.mu, cfg.y_max());
    auto est = observed_order(cfg.params, base, cfg.refinements, solver_options(cfg));
    CsvTable t;
    t.header = {"study", "M", "mu", "dy", "dtau", "N", "price", "xf_N"};
    for (auto [name, s] : {std::pair{"spatial", &est.spatial}, std::pair{"temporal", &est.temporal}})
        for (const auto& l : s->levels) {
            t.labels.push_back(name);
            t.rows.push_back({double(l.nodes), l.mu, l.dy, l.dtau, double(l.steps), l.price, l.xf});
        }
    emit_csv(t, cfg.output_dir / "order.csv");
    log << "spatial order (price): " << format_number(est.spatial.price_order())
        << "  temporal order (price): " << format_number(est.temporal.price_order()) << '\n';
    return {{"spatial", series_json(est.spatial)}, {"temporal", series_json(est.temporal)}};
}

json stability_mode(const ExperimentConfig& cfg, std::ostream& log) {
    auto g = build_grid(cfg.params, cfg.nodes, cfg.mu, cfg.y_max());
    std::vector<AmplificationQuery> qs;
    AmplificationQuery q0;
    q0.params = cfg.params;
    q0.grid = g;
    for (double alpha : cfg.scan_alphas)
        for (double a : cfg.scan_as)
            for (int n : cfg.scan_ns)
                for (int j = 1; j <= cfg.scan_wavenumbers; ++j) {
                    auto q = q0;
                    q.params.alpha = alpha;
                    q.a = a;
                    q.n = n;
                    q.b = j * std::numbers::pi / (cfg.scan_wavenumbers * g.dy);
                    qs.push_back(q);
                }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ub(1e-9, std::numbers::pi / g.dy);
    std::uniform_real_distribution<double> ua(0.05, 0.95), ulog(-2.0, 2.0);
    std::uniform_int_distribution<int> un(1, 200);
    for (int i = 0; i < cfg.random_samples; ++i) {
        auto q = q0;
        q.params.alpha = ua(rng);
        q.b = ub(rng);
        q.a = std::pow(10.0, ulog(rng));
        q.n = un(rng);
        qs.push_back(q);
    }
    auto res = parallel_map(qs, [](const AmplificationQuery& q) { return amplification_factor(q); });
    CsvTable t;
    t.header = {"alpha", "a", "n", "b", "K", "lambda", "imaginary_residual"};
    double worst = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        t.rows.push_back({qs[i].params.alpha, qs[i].a, double(qs[i].n), qs[i].b, res[i].K,
                          res[i].lambda, res[i].imaginary_residual});
        worst = std::max(worst, std::abs(res[i].lambda));
    }
    emit_csv(t, cfg.output_dir / "stability.csv");
    log << "queries: " << qs.size() << "  max |lambda|: " << format_number(worst) << '\n';
    return {{"queries", qs.size()}, {"max_abs_lambda", worst}, {"stable", worst < 1.0},
            {"grid", grid_json(g)}, {"lemma1", lemma1_json(lemma1_check(cfg.params, g))}};
}

json oracle_mode(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& p = cfg.params;
    const double S = p.strike;
    auto run = run_solver(p, cfg.nodes, cfg.mu, cfg.y_max(), solver_options(cfg));
    PsorOptions po;
    po.space_nodes = cfg.psor_nodes;
    po.time_steps = cfg.psor_steps;
    auto bin = binomial_american_put(p, S, cfg.binomial_steps);
    auto ps = psor_american_put(p, S, po);
    const double eu = european_put_closed_form(p, S);
    const double ff = price_at(run, S);
    const double ffb = p.strike * run.surface.xf(run.grid.steps);

    CsvTable t;
    t.header = {"method", "price", "resolution", "boundary"};
    t.labels = {"front-fixing", "binomial", "psor", "european"};
    t.rows = {{ff, double(cfg.nodes), ffb},
              {bin.price, double(bin.resolution), NAN},
              {ps.price, double(ps.resolution), ps.boundary_estimate.value_or(NAN)},
              {eu, 0.0, NAN}};
    emit_csv(t, cfg.output_dir / "oracle.csv");
    const double cell = po.s_max_factor * p.strike / po.space_nodes;
    log << "front-fixing " << format_number(ff) << "  binomial " << format_number(bin.price)
        << "  psor " << format_number(ps.price) << "  european " << format_number(eu) << '\n';
    json j = run_summary(run);
    j["oracles"] = {{"binomial", {{"price", bin.price}, {"steps", bin.resolution}}},
                    {"psor",
                     {{"price", ps.price},
                      {"nodes", ps.resolution},
                      {"boundary", ps.boundary_estimate ? json(*ps.boundary_estimate) : json(nullptr)},
                      {"cell", cell}}},
                    {"european", eu}};
    j["front_fixing_minus_binomial"] = ff - bin.price;
    j["psor_minus_binomial"] = ps.price - bin.price;
    if (ps.boundary_estimate) j["boundary_gap_cells"] = std::abs(*ps.boundary_estimate - ffb) / cell;
    return j;
}

}  // namespace

json run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    validate_config(cfg);
    ensure_dir(cfg.output_dir);
    json j;
    switch (cfg.mode) {
        case Mode::solve: j = solve_mode(cfg, log); break;
        case Mode::truncation_study: j = truncation_mode(cfg, log); break;
        case Mode::order_study: j = order_mode(cfg, log); break;
        case Mode::stability_scan: j = stability_mode(cfg, log); break;
        case Mode::oracle_compare: j = oracle_mode(cfg, log); break;
    }
    // fields every summary carries
    auto base = build_grid(cfg.params, cfg.nodes, cfg.mu, cfg.y_max());
    j["mode"] = std::string(to_string(cfg.mode));
    j["seed"] = cfg.seed;
    if (!j.contains("params")) j["params"] = params_json(cfg.params);
    if (!j.contains("horizon")) j["horizon"] = base.horizon();
    if (!j.contains("lemma1")) j["lemma1"] = lemma1_json(lemma1_check(cfg.params, base));
    if (!j.contains("max_iterations")) {
        // multi-run modes: aggregate over the per-run records
        int it = 0;
        json warn = json::array();
        auto scan = [&](const json& runs) {
            for (const auto& r : runs) {
                it = std::max(it, r.value("max_iterations", 0));
                if (r.value("denominator_warnings", 0) > 0) warn.push_back(r);
            }
        };
        if (j.contains("rows")) scan(j["rows"]);
        for (const char* key : {"spatial", "temporal"})
            if (j.contains(key)) scan(j[key]["levels"]);
        j["max_iterations"] = it;
        j["denominator_warnings"] = warn;
    }
    write_json(j, cfg.output_dir / "summary.json");
    return j;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Front-fixing Crank-Nicolson pricer for American puts with a Caputo-Fabrizio "
                 "time derivative"};
    std::string mode = "solve", y_text, variant, truncation, config, outdir;
    double r = 0, sigma = 0, E = 0, T = 0, alpha = 0, mu = 0;
    int M = 0, refinements = 0, bsteps = 0, pnodes = 0, psteps = 0, samples = 0;
    std::uint64_t seed = 0;

    app.add_option("mode", mode, "solve | truncation-study | order-study | stability-scan | oracle-compare")
        ->required();
    auto* o_r = app.add_option("--r", r, "risk-free rate");
    auto* o_sigma = app.add_option("--sigma", sigma, "volatility");
    auto* o_E = app.add_option("--E", E, "strike");
    auto* o_T = app.add_option("--T", T, "maturity in years");
    auto* o_alpha = app.add_option("--alpha", alpha, "fractional order in (0,1]; 1 is classical");
    auto* o_M = app.add_option("--M", M, "spatial nodes");
    auto* o_mu = app.add_option("--mu", mu, "grid ratio dtau/dy^2");
    auto* o_Y = app.add_option("--Y", y_text, "truncation bound; comma list in truncation-study");
    auto* o_out = app.add_option("--out", outdir, "output directory");
    auto* o_cfg = app.add_option("--config", config, "JSON config; flags override it");
    auto* o_seed = app.add_option("--seed", seed, "seed for randomized sweeps");
    auto* o_var = app.add_option("--variant", variant, "consistent | published");
    auto* o_trunc = app.add_option("--truncation", truncation, "spacing | nodes (truncation-study)");
    auto* o_ref = app.add_option("--refinements", refinements, "halvings in order-study");
    auto* o_bs = app.add_option("--binomial-steps", bsteps, "tree steps in oracle-compare");
    auto* o_pn = app.add_option("--psor-nodes", pnodes, "PSOR space nodes");
    auto* o_ps = app.add_option("--psor-steps", psteps, "PSOR time steps");
    auto* o_smp = app.add_option("--samples", samples, "random queries added to stability-scan");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    ExperimentConfig cfg;
    try {
        cfg.mode = parse_mode(mode);
        if (o_cfg->count()) {
            std::ifstream is(config);
            if (!is) throw DomainError("cannot read config " + config);
            json j;
            try {
                j = json::parse(is);
            } catch (const json::exception& e) {
                throw DomainError(std::string("bad config: ") + e.what());
            }
            j.erase("mode");
            apply_config_json(cfg, j);
        }
        if (o_r->count()) cfg.params.rate = r;
        if (o_sigma->count()) cfg.params.sigma = sigma;
        if (o_E->count()) cfg.params.strike = E;
        if (o_T->count()) cfg.params.maturity = T;
        if (o_alpha->count()) cfg.params.alpha = alpha;
        if (o_M->count()) cfg.nodes = M;
        if (o_mu->count()) cfg.mu = mu;
        if (o_Y->count()) cfg.ys = parse_list(y_text);
        else if (cfg.mode == Mode::truncation_study && !o_cfg->count()) cfg.ys = {1.0, 2.0, 4.0};
        if (o_out->count()) cfg.output_dir = outdir;
        if (o_seed->count()) cfg.seed = seed;
        if (o_var->count()) cfg.variant = parse_variant(variant);
        if (o_trunc->count()) cfg.truncation = parse_truncation(truncation);
        if (o_ref->count()) cfg.refinements = refinements;
        if (o_bs->count()) cfg.binomial_steps = bsteps;
        if (o_pn->count()) cfg.psor_nodes = pnodes;
        if (o_ps->count()) cfg.psor_steps = psteps;
        if (o_smp->count()) cfg.random_samples = samples;
        validate_config(cfg);
    } catch (const DomainError& e) {
        err << "validation error: " << e.what() << '\n';
        return 1;
    } catch (const json::exception& e) {
        err << "validation error: " << e.what() << '\n';
        return 1;
    }

    try {
        run_experiment(cfg, out);
    } catch (const DomainError& e) {
        err << "validation error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure";
        if (e.step() >= 0) err << " at step " << e.step();
        err << ": " << e.what() << '\n';
        json j = {{"mode", std::string(to_string(cfg.mode))},
                  {"error", e.what()},
                  {"step", e.step()}};
        try {
            ensure_dir(cfg.output_dir);
            write_json(j, cfg.output_dir / "summary.json");
        } catch (...) {
        }
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace fronfix
