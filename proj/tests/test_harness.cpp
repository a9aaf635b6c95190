#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fronfix/harness.hpp"

using namespace fronfix;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("fronfix_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int cli(std::vector<std::string> args, std::string* err_out = nullptr) {
    args.insert(args.begin(), "fronfix");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_out) *err_out = err.str();
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream is(p);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

// Minimal well-formedness check: balanced tags and quoted attributes.
bool well_formed(const std::string& xml) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    while ((i = xml.find('<', i)) != std::string::npos) {
        std::size_t j = xml.find('>', i);
        if (j == std::string::npos) return false;
        std::string tag = xml.substr(i + 1, j - i - 1);
        i = j + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') continue;
        std::size_t quotes = std::count(tag.begin(), tag.end(), '"');
        if (quotes % 2) return false;
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
            continue;
        }
        bool self = tag.back() == '/';
        std::string name = tag.substr(0, tag.find_first_of(" /"));
        if (!self) stack.push_back(name);
    }
    return stack.empty();
}

SolverResult small_run() {
    ModelParams p;
    return run_solver(p, build_grid(p, 4, 1.0, 4.0));
}

}  // namespace

TEST_CASE("emit_csv writes headers and rows") {
    auto dir = scratch("csv");
    CsvTable empty;
    empty.header = {"a", "b"};
    emit_csv(empty, dir / "empty.csv");
    CHECK(slurp(dir / "empty.csv") == "a,b\n");

    auto run = small_run();
    REQUIRE(run.grid.steps == 1);
    emit_csv(boundary_table(run), dir / "boundary.csv");
    emit_csv(surface_table(run), dir / "surface.csv");
    auto b = read_csv(dir / "boundary.csv");
    auto s = read_csv(dir / "surface.csv");
    CHECK(b.size() == 1 + 2);
    CHECK(s.size() == 1 + 10);
    CHECK(b[0] == std::vector<std::string>{"n", "tau", "xf", "Xstar"});
    CHECK(s[0] == std::vector<std::string>{"n", "m", "y", "v", "V"});
    for (std::size_t r = 1; r < s.size(); ++r) {
        int n = std::stoi(s[r][0]), m = std::stoi(s[r][1]);
        CHECK(n == int((r - 1) / 5));
        CHECK(m == int((r - 1) % 5));
    }
}

TEST_CASE("csv values round-trip bit for bit") {
    auto dir = scratch("roundtrip");
    ModelParams p;
    p.alpha = 0.7;
    auto run = run_solver(p, 30, 20.0, 4.0);
    emit_csv(surface_table(run), dir / "surface.csv");
    emit_csv(boundary_table(run), dir / "boundary.csv");
    auto s = read_csv(dir / "surface.csv");
    for (std::size_t r = 1; r < s.size(); ++r) {
        int n = std::stoi(s[r][0]), m = std::stoi(s[r][1]);
        CHECK(std::strtod(s[r][3].c_str(), nullptr) == run.surface.v(n, m));
        CHECK(std::strtod(s[r][2].c_str(), nullptr) == run.grid.y(m));
    }
    auto b = read_csv(dir / "boundary.csv");
    for (std::size_t r = 1; r < b.size(); ++r)
        CHECK(std::strtod(b[r][2].c_str(), nullptr) == run.surface.xf(int(r - 1)));
}

TEST_CASE("plot output") {
    auto dir = scratch("plot");
    ModelParams p;
    auto run = run_solver(p, 50, 20.0, 4.0);
    emit_plot_script(run, dir);
    auto svg = slurp(dir / "plot.svg");
    CHECK(well_formed(svg));
    auto at = svg.find("id=\"boundary-path\"");
    REQUIRE(at != std::string::npos);
    auto pts = svg.find("points=\"", at) + 8;
    auto end = svg.find('"', pts);
    std::string list = svg.substr(pts, end - pts);
    CHECK(std::count(list.begin(), list.end(), ',') == run.grid.steps + 1);

    double lo = 1.0;
    for (int n = 0; n <= run.grid.steps; ++n) lo = std::min(lo, run.surface.xf(n));
    auto ym = svg.find("data-ymin=\"") + 11;
    CHECK(std::stod(svg.substr(ym)) == doctest::Approx(lo).epsilon(1e-5));
    CHECK(svg.find("data-ymax=\"1\"") != std::string::npos);

    auto gp = slurp(dir / "plot.gp");
    CHECK(gp.find("boundary.csv") != std::string::npos);
    CHECK(gp.find("surface.csv") != std::string::npos);

    CHECK_FALSE(well_formed("<svg><g></svg>"));
}

TEST_CASE("cli solve writes the three outputs") {
    auto dir = scratch("solve");
    int rc = cli({"solve", "--r", "0.1", "--sigma", "0.2", "--E", "1", "--T", "1", "--alpha", "0.9",
                  "--M", "100", "--mu", "20", "--Y", "4", "--out", dir.string()});
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "surface.csv"));
    CHECK(fs::exists(dir / "boundary.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "plot.svg"));
    auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(j["horizon"].get<double>() == doctest::Approx(32 * 0.032));
    CHECK(j.contains("lemma1"));
    CHECK(j["lemma1"].contains("cond_timestep"));
    CHECK(j["max_iterations"].get<int>() >= 1);
    CHECK(j["denominator_warnings"].is_array());
    CHECK(read_csv(dir / "boundary.csv").size() == 34);
}

TEST_CASE("cli truncation-study") {
    auto dir = scratch("trunc");
    CHECK(cli({"truncation-study", "--Y", "1,2,4", "--mu", "20", "--M", "50", "--out",
               dir.string()}) == 0);
    auto t = read_csv(dir / "truncation.csv");
    CHECK(t.size() == 4);
    auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(j["rows"].size() == 3);
    CHECK(j.contains("horizon"));
    CHECK(j.contains("max_iterations"));
}

TEST_CASE("cli exit codes") {
    auto dir = scratch("codes");
    std::string err;
    CHECK(cli({"solve", "--sigma", "-1", "--out", dir.string()}, &err) == 1);
    CHECK(err.find("sigma must be positive") != std::string::npos);
    CHECK(cli({"solve", "--nope", "3"}) == 1);
    CHECK(cli({"frobnicate"}) == 1);
    CHECK(cli({"solve", "--Y", "1,2"}) == 1);
    CHECK(cli({"solve", "--config", (dir / "missing.json").string()}) == 1);
    CHECK(cli({"solve", "--alpha", "1", "--variant", "published"}) == 1);
    CHECK(cli({"solve", "--alpha", "0.6", "--variant", "published", "--M", "50", "--out",
               dir.string()},
              &err) == 2);
    CHECK(err.find("step 1") != std::string::npos);
    CHECK(cli({"--help"}) == 0);
}

TEST_CASE("cli config file with flag override") {
    auto dir = scratch("config");
    {
        std::ofstream os(dir / "cfg.json");
        os << R"({"r": 0.05, "sigma": 0.3, "M": 40, "mu": 10, "Y": 3, "alpha": 0.8})";
    }
    CHECK(cli({"solve", "--config", (dir / "cfg.json").string(), "--M", "30", "--out",
               (dir / "o").string()}) == 0);
    auto j = nlohmann::json::parse(slurp(dir / "o" / "summary.json"));
    CHECK(j["params"]["r"].get<double>() == 0.05);
    CHECK(j["params"]["alpha"].get<double>() == 0.8);
    CHECK(j["grid"]["M"].get<int>() == 30);
    CHECK(j["grid"]["Y"].get<double>() == 3.0);

    {
        std::ofstream os(dir / "bad.json");
        os << R"({"colour": 1})";
    }
    CHECK(cli({"solve", "--config", (dir / "bad.json").string()}) == 1);
}

TEST_CASE("identical configuration gives identical files") {
    auto a = scratch("det_a"), b = scratch("det_b");
    for (auto& d : {a, b}) {
        CHECK(cli({"solve", "--alpha", "0.7", "--M", "60", "--out", d.string()}) == 0);
        CHECK(cli({"stability-scan", "--samples", "50", "--seed", "12", "--out", (d / "s").string()}) == 0);
        CHECK(cli({"truncation-study", "--M", "40", "--out", (d / "t").string()}) == 0);
    }
    for (const char* f : {"surface.csv", "boundary.csv", "summary.json", "s/stability.csv",
                          "t/truncation.csv"})
        CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("cli order-study, stability-scan and oracle-compare") {
    auto dir = scratch("modes");
    CHECK(cli({"order-study", "--M", "50", "--mu", "25", "--refinements", "2", "--out",
               (dir / "o").string()}) == 0);
    auto o = nlohmann::json::parse(slurp(dir / "o" / "summary.json"));
    CHECK(o["spatial"]["levels"].size() == 3);
    CHECK(o["max_iterations"].get<int>() >= 1);

    CHECK(cli({"stability-scan", "--out", (dir / "s").string()}) == 0);
    auto s = nlohmann::json::parse(slurp(dir / "s" / "summary.json"));
    CHECK(s["queries"].get<int>() == 3 * 3 * 3 * 20);
    CHECK(s["stable"].get<bool>());

    CHECK(cli({"oracle-compare", "--M", "100", "--binomial-steps", "500", "--psor-nodes", "200",
               "--psor-steps", "200", "--out", (dir / "c").string()}) == 0);
    auto c = read_csv(dir / "c" / "oracle.csv");
    CHECK(c.size() == 5);
    CHECK(c[1][0] == "front-fixing");
}

TEST_CASE("config parsing") {
    ExperimentConfig cfg;
    apply_config_json(cfg, nlohmann::json::parse(R"({"Y": [1, 2], "mode": "truncation-study"})"));
    CHECK(cfg.ys.size() == 2);
    CHECK(cfg.mode == Mode::truncation_study);
    validate_config(cfg);
    cfg.mode = Mode::solve;
    CHECK_THROWS(validate_config(cfg));
    CHECK(parse_mode("order-study") == Mode::order_study);
    CHECK(format_number(0.1) == "0.10000000000000001");
}
