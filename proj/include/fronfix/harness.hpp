#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fronfix/analysis.hpp"
#include "fronfix/model.hpp"
#include "fronfix/scheme.hpp"

namespace fronfix {

enum class Mode { solve, truncation_study, order_study, stability_scan, oracle_compare };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view name);

struct ExperimentConfig {
    Mode mode = Mode::solve;
    ModelParams params;
    int nodes = 100;
    double mu = 20.0;
    std::vector<double> ys{4.0};  ///< one entry except in truncation-study
    SchemeVariant variant = SchemeVariant::consistent;
    TruncationMode truncation = TruncationMode::fixed_spacing;
    int refinements = 3;
    int binomial_steps = 5000;
    int psor_nodes = 400;
    int psor_steps = 400;
    std::vector<double> scan_alphas{0.3, 0.6, 0.9};
    std::vector<double> scan_as{0.1, 1.0, 10.0};
    std::vector<int> scan_ns{1, 10, 100};
    int scan_wavenumbers = 20;  ///< b = j pi / (count dy), j = 1..count
    int random_samples = 0;     ///< extra random queries in stability-scan
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = ".";

    double y_max() const { return ys.front(); }
};

/// Applies the keys of a JSON object onto `cfg`. Keys mirror the long flag
/// names ("r", "sigma", "E", "T", "alpha", "M", "mu", "Y", ...).
void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j);

/// Rejects missing or inconsistent mode inputs; throws DomainError.
void validate_config(const ExperimentConfig& cfg);

struct CsvTable {
    std::vector<std::string> header;
    /// Optional text first column; header[0] names it when present.
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
};

/// n, tau, xf, Xstar
CsvTable boundary_table(const SolverResult& run);
/// n, m, y, v, V
CsvTable surface_table(const SolverResult& run);

/// Writes the header and every row, numbers with 17 significant digits.
void emit_csv(const CsvTable& table, const std::filesystem::path& path);
std::string format_number(double x);

/// plot.svg (boundary path and final value profile) and plot.gp, a gnuplot
/// script reading boundary.csv and surface.csv, both in `dir`.
void emit_plot_script(const SolverResult& run, const std::filesystem::path& dir);
std::string render_svg(const SolverResult& run);

nlohmann::json run_summary(const SolverResult& run);

/// Executes the configured experiment, writing its outputs into
/// cfg.output_dir. Returns the summary that was written to summary.json.
nlohmann::json run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Exit codes: 0 success, 1 validation error, 2 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fronfix
