#include <catch2/catch.hpp>

#include <algorithm>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "segsim/cli.hpp"

using namespace segsim;
using segsim::cli::CliConfig;
using segsim::cli::Command;
using segsim::cli::parse_args;
using segsim::cli::UsageError;

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("segsim_test_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct CoutCapture {
    std::ostringstream captured;
    std::streambuf* saved;
    CoutCapture() : saved(std::cout.rdbuf(captured.rdbuf())) {}
    ~CoutCapture() { std::cout.rdbuf(saved); }
};

int run_quiet(const std::vector<std::string>& args) {
    const CoutCapture out;
    std::ostringstream err;
    std::streambuf* saved_err = std::cerr.rdbuf(err.rdbuf());
    const int code = segsim::cli::run_cli(args);
    std::cerr.rdbuf(saved_err);
    return code;
}

}  // namespace

TEST_CASE("parse_args fills the documented defaults", "[cli]") {
    const CliConfig cfg = parse_args({"run", "--theta", "0.2"});
    REQUIRE(cfg.command == Command::run);
    REQUIRE(cfg.params.n_agents == 100);
    REQUIRE(cfg.params.n_communities == 20);
    REQUIRE(cfg.params.k_interactors == 10);
    REQUIRE(cfg.params.theta == 0.2);
    REQUIRE(cfg.params.max_steps == 100000);
    REQUIRE(cfg.params.seed == kDefaultSeed);
    REQUIRE(cfg.params.balanced_init);
    REQUIRE(cfg.replicates == 10);
    REQUIRE(cfg.stride == 100);
    REQUIRE(cfg.workers == 1);
    REQUIRE_FALSE(cfg.emit_svg);
}

TEST_CASE("parse_args landscape defaults: k 1..50, theta 0..0.5 step 0.01", "[cli]") {
    const CliConfig cfg = parse_args({"landscape"});
    REQUIRE(cfg.command == Command::landscape);
    REQUIRE(cfg.theta_grid.size() == 51);
    REQUIRE(cfg.theta_grid.front() == 0.0);
    REQUIRE(cfg.theta_grid[1] == 0.01);
    REQUIRE(cfg.theta_grid.back() == 0.5);
}

TEST_CASE("parse_args sweep default grid is 0..0.5 step 0.025", "[cli]") {
    const CliConfig cfg = parse_args({"sweep"});
    REQUIRE(cfg.theta_grid.size() == 21);
    REQUIRE(cfg.theta_grid[3] == 0.075);
    REQUIRE(cfg.theta_grid.back() == 0.5);
}

TEST_CASE("parse_args flag handling", "[cli]") {
    const CliConfig cfg = parse_args({"sweep", "--agents", "50", "--communities", "5", "--k", "3",
                                      "--steps", "1000", "--seed", "7", "--replicates", "4",
                                      "--theta-grid", "0:0.1:0.05", "--stride", "10", "--workers",
                                      "2", "--out", "somewhere", "--svg", "--balanced-init",
                                      "false"});
    REQUIRE(cfg.params.n_agents == 50);
    REQUIRE(cfg.params.n_communities == 5);
    REQUIRE(cfg.params.k_interactors == 3);
    REQUIRE(cfg.params.max_steps == 1000);
    REQUIRE(cfg.params.seed == 7);
    REQUIRE_FALSE(cfg.params.balanced_init);
    REQUIRE(cfg.replicates == 4);
    REQUIRE(cfg.theta_grid == std::vector<double>{0.0, 0.05, 0.1});
    REQUIRE(cfg.stride == 10);
    REQUIRE(cfg.workers == 2);
    REQUIRE(cfg.output_dir == fs::path("somewhere"));
    REQUIRE(cfg.emit_svg);
}

TEST_CASE("parse_args rejects malformed input", "[cli]") {
    REQUIRE_THROWS_AS(parse_args({}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"walk"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"run", "--theta", "1.5"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"run", "--theta", "-0.1"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"run", "--theta", "abc"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"run", "--theta"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"run", "--frobnicate", "1"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"run", "--agents", "1"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"run", "--agents", "-5"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"sweep", "--replicates", "1"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"sweep", "--theta-grid", "0:0.5"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"sweep", "--theta-grid", "0.4:0.2:0.1"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"sweep", "--theta-grid", "0:2:0.5"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"run", "--balanced-init", "maybe"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"run", "--stride", "0"}), UsageError);
    REQUIRE_THROWS_AS(parse_args({"run", "--workers", "0"}), UsageError);
}

TEST_CASE("run_cli maps errors to exit codes", "[cli]") {
    REQUIRE(run_quiet({"run", "--theta", "1.5"}) == 2);
    REQUIRE(run_quiet({"bogus"}) == 2);
    REQUIRE(run_quiet({}) == 2);
    REQUIRE(run_quiet({"--help"}) == 0);
    REQUIRE(run_quiet({"run", "-h"}) == 0);
}

TEST_CASE("cmd_run writes the time series and prints the reading", "[cli]") {
    const TempDir dir("run");
    const CoutCapture out;
    const int code = segsim::cli::run_cli({"run", "--theta", "0.2", "--steps", "300", "--stride",
                                           "100", "--out", dir.path.string(), "--svg"});
    REQUIRE(code == 0);

    const std::string csv = io::read_text_file(dir.path / "timeseries.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    REQUIRE(header == "step,phi,mean_c0,mean_c1,mean_c2,mean_c3,mean_c4,mean_c5,mean_c6,mean_c7,"
                      "mean_c8,mean_c9,mean_c10,mean_c11,mean_c12,mean_c13,mean_c14,mean_c15,"
                      "mean_c16,mean_c17,mean_c18,mean_c19");
    int rows = 0;
    for (std::string line; std::getline(lines, line);) {
        ++rows;
    }
    REQUIRE(rows == 4);  // steps 0, 100, 200, 300

    const std::string printed = out.captured.str();
    REQUIRE(printed.find("final_phi: ") != std::string::npos);
    REQUIRE(printed.find("homophily: ") != std::string::npos);
    REQUIRE(printed.find("homogeneous_agent_fraction: ") != std::string::npos);
    REQUIRE(printed.find("schelling_effect: ") != std::string::npos);

    const std::string svg = io::read_text_file(dir.path / "timeseries.svg");
    REQUIRE(svg.rfind("<svg", 0) == 0);
    REQUIRE(std::count(svg.begin(), svg.end(), '\n') > 10);
}

TEST_CASE("cmd_run with zero steps emits header plus one row", "[cli]") {
    const TempDir dir("run0");
    REQUIRE(run_quiet({"run", "--steps", "0", "--out", dir.path.string()}) == 0);
    const std::string csv = io::read_text_file(dir.path / "timeseries.csv");
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 2);
    REQUIRE(csv.substr(csv.find('\n') + 1, 2) == "0,");
}

TEST_CASE("cmd_run leaves empty fields for empty communities", "[cli]") {
    const TempDir dir("empties");
    REQUIRE(run_quiet({"run", "--agents", "2", "--communities", "6", "--steps", "0", "--out",
                       dir.path.string()}) == 0);
    const std::string csv = io::read_text_file(dir.path / "timeseries.csv");
    // 2 agents over 6 communities: at least four mean fields are empty
    const std::string data_row = csv.substr(csv.find('\n') + 1);
    REQUIRE(std::count(data_row.begin(), data_row.end(), ',') == 7);
    REQUIRE(data_row.find(",,") != std::string::npos);
}

TEST_CASE("identical flags give byte-identical output files", "[cli]") {
    const TempDir a("bytes_a"), b("bytes_b");
    const std::vector<std::string> flags{"run", "--theta", "0.15", "--steps", "2000",
                                         "--seed", "99"};
    auto with_out = [](std::vector<std::string> f, const fs::path& p) {
        f.push_back("--out");
        f.push_back(p.string());
        return f;
    };
    REQUIRE(run_quiet(with_out(flags, a.path)) == 0);
    REQUIRE(run_quiet(with_out(flags, b.path)) == 0);
    REQUIRE(io::read_text_file(a.path / "timeseries.csv") ==
            io::read_text_file(b.path / "timeseries.csv"));
}

TEST_CASE("cmd_sweep writes one row per theta plus replicate columns", "[cli]") {
    const TempDir dir("sweep");
    REQUIRE(run_quiet({"sweep", "--agents", "40", "--communities", "8", "--k", "4", "--steps",
                       "500", "--replicates", "3", "--theta-grid", "0:0.4:0.2", "--out",
                       dir.path.string(), "--svg"}) == 0);
    const std::string csv = io::read_text_file(dir.path / "sweep.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    REQUIRE(header == "theta,phi_mean,ci_low,ci_high,phi_rep_0,phi_rep_1,phi_rep_2");
    std::vector<std::string> rows;
    for (std::string line; std::getline(lines, line);) {
        rows.push_back(line);
    }
    REQUIRE(rows.size() == 3);
    REQUIRE(rows[0].rfind("0,", 0) == 0);
    REQUIRE(rows[1].rfind("0.2,", 0) == 0);
    REQUIRE(rows[2].rfind("0.4,", 0) == 0);
    REQUIRE(io::read_text_file(dir.path / "sweep.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("cmd_sweep output is identical across worker counts", "[cli]") {
    const TempDir a("workers1"), b("workers4");
    const std::vector<std::string> base{"sweep", "--agents", "40", "--communities", "8",
                                        "--k", "4", "--steps", "800", "--replicates", "4",
                                        "--theta-grid", "0:0.3:0.1", "--seed", "5"};
    auto with = [](std::vector<std::string> f, std::initializer_list<std::string> extra) {
        f.insert(f.end(), extra);
        return f;
    };
    REQUIRE(run_quiet(with(base, {"--workers", "1", "--out", a.path.string()})) == 0);
    REQUIRE(run_quiet(with(base, {"--workers", "4", "--out", b.path.string()})) == 0);
    REQUIRE(io::read_text_file(a.path / "sweep.csv") == io::read_text_file(b.path / "sweep.csv"));
}

TEST_CASE("cmd_landscape emits the long-form table with exact dyadic values", "[cli]") {
    const TempDir dir("landscape");
    REQUIRE(run_quiet({"landscape", "--out", dir.path.string(), "--svg"}) == 0);
    const std::string csv = io::read_text_file(dir.path / "landscape.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    REQUIRE(header == "k,theta,prob,log10_prob");
    std::vector<std::string> rows;
    bool found_05 = false, found_15 = false;
    for (std::string line; std::getline(lines, line);) {
        rows.push_back(line);
        if (line.rfind("10,0.05,", 0) == 0) {
            REQUIRE(line.substr(8, 12) == "0.0009765625");
            found_05 = true;
        }
        if (line.rfind("10,0.15,", 0) == 0) {
            REQUIRE(line.substr(8, 12) == "0.0107421875");
            found_15 = true;
        }
    }
    REQUIRE(rows.size() == 50 * 51);
    REQUIRE(found_05);
    REQUIRE(found_15);
    REQUIRE(io::read_text_file(dir.path / "landscape.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("emitted CSV numbers round-trip exactly", "[cli]") {
    const TempDir dir("roundtrip");
    REQUIRE(run_quiet({"run", "--theta", "0.35", "--steps", "1000", "--stride", "250", "--out",
                       dir.path.string()}) == 0);

    // recompute the same series in-process and compare against the parsed file
    ModelParams p;
    p.theta = 0.35;
    p.max_steps = 1000;
    const TimeSeries ts = run_single(p, 250);

    const std::string csv = io::read_text_file(dir.path / "timeseries.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    std::size_t row = 0;
    while (std::getline(lines, line)) {
        const auto first_comma = line.find(',');
        const auto second_comma = line.find(',', first_comma + 1);
        const std::string phi_text = line.substr(first_comma + 1, second_comma - first_comma - 1);
        REQUIRE(io::parse_double(phi_text) == ts.phi_trace.at(row));
        ++row;
    }
    REQUIRE(row == ts.steps.size());
}
