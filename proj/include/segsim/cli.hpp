#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "segsim/analytics.hpp"
#include "segsim/csv.hpp"
#include "segsim/harness.hpp"
#include "segsim/metrics.hpp"
#include "segsim/model.hpp"
#include "segsim/svg.hpp"

namespace segsim::cli {

// Malformed command line; run_cli maps it to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Command { run, sweep, landscape };

struct CliConfig {
    Command command = Command::run;
    ModelParams params;
    std::vector<double> theta_grid;  // sweep theta axis / landscape theta axis
    std::uint32_t replicates = 10;
    std::uint64_t stride = 100;
    unsigned workers = 1;
    std::filesystem::path output_dir = ".";
    bool emit_svg = false;
};

inline std::string usage_text() {
    return
        "usage: segsim <command> [flags]\n"
        "\n"
        "commands:\n"
        "  run         one simulation; writes timeseries.csv (+ timeseries.svg)\n"
        "  sweep       replicate sweep over theta; writes sweep.csv (+ sweep.svg)\n"
        "  landscape   analytic migration-probability grid; writes landscape.csv\n"
        "              (+ landscape.svg)\n"
        "\n"
        "flags (defaults in parentheses):\n"
        "  --agents <N>            number of agents (100)\n"
        "  --communities <C>       number of communities (20)\n"
        "  --k <K>                 interactors sampled per step (10)\n"
        "  --theta <T>             tolerance threshold in [0,1] (0.2; run only)\n"
        "  --steps <S>             steps per run (100000)\n"
        "  --seed <S>              master seed (123456789)\n"
        "  --balanced-init <B>     true = exact 50/50 opinions, false = fair coin (true)\n"
        "  --replicates <R>        replicates per theta, sweep only (10)\n"
        "  --theta-grid <a:b:s>    theta axis start:stop:step\n"
        "                          (sweep 0:0.5:0.025, landscape 0:0.5:0.01)\n"
        "  --stride <S>            steps between time-series rows (100)\n"
        "  --workers <W>           sweep worker threads (1)\n"
        "  --out <dir>             output directory (.)\n"
        "  --svg                   also write SVG charts\n"
        "  --help                  show this text\n";
}

namespace detail {

inline std::uint64_t parse_u64_flag(std::string_view flag, std::string_view text) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw UsageError(std::string(flag) + " expects an unsigned integer, got '" +
                         std::string(text) + "'");
    }
    return v;
}

inline double parse_double_flag(std::string_view flag, std::string_view text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || std::isnan(v)) {
        throw UsageError(std::string(flag) + " expects a number, got '" + std::string(text) + "'");
    }
    return v;
}

inline bool parse_bool_flag(std::string_view flag, std::string_view text) {
    if (text == "true" || text == "1") {
        return true;
    }
    if (text == "false" || text == "0") {
        return false;
    }
    throw UsageError(std::string(flag) + " expects true|false, got '" + std::string(text) + "'");
}

// Grid values accumulate float noise (0 + 3*0.025 != 0.075); snapping to 12
// decimals restores the intended decimals so CSV output prints them cleanly.
inline double snap_grid_value(double v) {
    return std::round(v * 1e12) / 1e12;
}

inline std::vector<double> parse_theta_grid(std::string_view text) {
    const auto first = text.find(':');
    const auto second = text.find(':', first == std::string_view::npos ? first : first + 1);
    if (first == std::string_view::npos || second == std::string_view::npos) {
        throw UsageError("--theta-grid expects start:stop:step, got '" + std::string(text) + "'");
    }
    const double start = parse_double_flag("--theta-grid", text.substr(0, first));
    const double stop = parse_double_flag("--theta-grid", text.substr(first + 1, second - first - 1));
    const double step = parse_double_flag("--theta-grid", text.substr(second + 1));
    if (!(step > 0.0)) {
        throw UsageError("--theta-grid step must be > 0");
    }
    if (!(start >= 0.0 && stop <= 1.0 && start <= stop)) {
        throw UsageError("--theta-grid must satisfy 0 <= start <= stop <= 1");
    }
    std::vector<double> values;
    for (std::uint32_t i = 0;; ++i) {
        const double v = snap_grid_value(start + i * step);
        if (v > stop + step * 1e-9) {
            break;
        }
        values.push_back(v);
    }
    return values;
}

inline std::vector<double> default_grid(double stop, double step) {
    std::vector<double> values;
    for (std::uint32_t i = 0;; ++i) {
        const double v = snap_grid_value(i * step);
        if (v > stop + step * 1e-9) {
            break;
        }
        values.push_back(v);
    }
    return values;
}

}  // namespace detail

// Parses and validates every flag before any computation starts.
inline CliConfig parse_args(const std::vector<std::string>& args) {
    if (args.empty()) {
        throw UsageError("missing command (run | sweep | landscape)");
    }
    CliConfig cfg;
    if (args[0] == "run") {
        cfg.command = Command::run;
    } else if (args[0] == "sweep") {
        cfg.command = Command::sweep;
    } else if (args[0] == "landscape") {
        cfg.command = Command::landscape;
    } else {
        throw UsageError("unknown command '" + args[0] + "' (expected run | sweep | landscape)");
    }

    bool grid_set = false;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& flag = args[i];
        auto value = [&]() -> const std::string& {
            if (i + 1 >= args.size()) {
                throw UsageError(flag + " requires a value");
            }
            return args[++i];
        };
        if (flag == "--agents") {
            cfg.params.n_agents = static_cast<std::uint32_t>(detail::parse_u64_flag(flag, value()));
        } else if (flag == "--communities") {
            cfg.params.n_communities =
                static_cast<std::uint32_t>(detail::parse_u64_flag(flag, value()));
        } else if (flag == "--k") {
            cfg.params.k_interactors =
                static_cast<std::uint32_t>(detail::parse_u64_flag(flag, value()));
        } else if (flag == "--theta") {
            cfg.params.theta = detail::parse_double_flag(flag, value());
        } else if (flag == "--steps") {
            cfg.params.max_steps = detail::parse_u64_flag(flag, value());
        } else if (flag == "--seed") {
            cfg.params.seed = detail::parse_u64_flag(flag, value());
        } else if (flag == "--balanced-init") {
            cfg.params.balanced_init = detail::parse_bool_flag(flag, value());
        } else if (flag == "--replicates") {
            cfg.replicates = static_cast<std::uint32_t>(detail::parse_u64_flag(flag, value()));
        } else if (flag == "--theta-grid") {
            cfg.theta_grid = detail::parse_theta_grid(value());
            grid_set = true;
        } else if (flag == "--stride") {
            cfg.stride = detail::parse_u64_flag(flag, value());
        } else if (flag == "--workers") {
            cfg.workers = static_cast<unsigned>(detail::parse_u64_flag(flag, value()));
        } else if (flag == "--out") {
            cfg.output_dir = value();
        } else if (flag == "--svg") {
            cfg.emit_svg = true;
        } else {
            throw UsageError("unknown flag '" + flag + "'");
        }
    }

    if (!grid_set) {
        cfg.theta_grid = cfg.command == Command::landscape ? detail::default_grid(0.5, 0.01)
                                                           : detail::default_grid(0.5, 0.025);
    }

    if (cfg.params.n_agents < 2) {
        throw UsageError("--agents must be >= 2");
    }
    if (cfg.params.n_communities < 2) {
        throw UsageError("--communities must be >= 2");
    }
    if (cfg.params.k_interactors < 1) {
        throw UsageError("--k must be >= 1");
    }
    if (!(cfg.params.theta >= 0.0 && cfg.params.theta <= 1.0)) {
        throw UsageError("--theta must be in [0, 1]");
    }
    if (cfg.stride < 1) {
        throw UsageError("--stride must be >= 1");
    }
    if (cfg.workers < 1) {
        throw UsageError("--workers must be >= 1");
    }
    if (cfg.command == Command::sweep && cfg.replicates < 2) {
        throw UsageError("--replicates must be >= 2");
    }
    return cfg;
}

namespace detail {

inline void ensure_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory: " + dir.string());
    }
}

inline std::string bool_text(bool v) {
    return v ? "true" : "false";
}

}  // namespace detail

// timeseries.csv: step, phi, mean_c0..mean_c{C-1}; empty community -> empty
// field. Prints the final reading to stdout.
inline int cmd_run(const CliConfig& cfg) {
    detail::ensure_output_dir(cfg.output_dir);

    TimeSeries series;
    const ModelState final_state = run(
        cfg.params,
        [&series](std::uint64_t t, const ModelState& s) {
            series.steps.push_back(t);
            series.community_means.push_back(community_opinion_means(s));
            series.phi_trace.push_back(disagreement_phi(s));
        },
        cfg.stride);

    std::string csv = "step,phi";
    for (std::uint32_t c = 0; c < cfg.params.n_communities; ++c) {
        csv += ",mean_c" + io::format_u64(c);
    }
    csv += "\n";
    for (std::size_t row = 0; row < series.steps.size(); ++row) {
        csv += io::format_u64(series.steps[row]) + "," + io::format_double(series.phi_trace[row]);
        for (const auto& mean : series.community_means[row]) {
            csv += ",";
            if (mean.has_value()) {
                csv += io::format_double(*mean);
            }
        }
        csv += "\n";
    }
    io::write_text_file(cfg.output_dir / "timeseries.csv", csv);
    if (cfg.emit_svg) {
        io::write_text_file(cfg.output_dir / "timeseries.svg",
                            io::render_timeseries_svg(series, cfg.params.n_communities));
    }

    const SegregationReading reading = segregation_reading(final_state);
    std::cout << "final_phi: " << io::format_double(reading.phi) << "\n"
              << "homophily: " << io::format_double(reading.homophily) << "\n"
              << "homogeneous_agent_fraction: "
              << io::format_double(reading.homogeneous_agent_fraction) << "\n"
              << "schelling_effect: "
              << detail::bool_text(schelling_effect_flag(reading, cfg.params.theta)) << "\n";
    return 0;
}

// sweep.csv: theta, phi_mean, ci_low, ci_high, phi_rep_0..phi_rep_{R-1}.
inline int cmd_sweep(const CliConfig& cfg) {
    detail::ensure_output_dir(cfg.output_dir);

    SweepConfig sweep_cfg;
    sweep_cfg.base = cfg.params;
    sweep_cfg.theta_values = cfg.theta_grid;
    sweep_cfg.replicates = cfg.replicates;
    sweep_cfg.record_stride = cfg.stride;
    const std::vector<SweepResult> results = run_sweep(sweep_cfg, cfg.workers);

    std::string csv = "theta,phi_mean,ci_low,ci_high";
    for (std::uint32_t r = 0; r < cfg.replicates; ++r) {
        csv += ",phi_rep_" + io::format_u64(r);
    }
    csv += "\n";
    for (const auto& row : results) {
        csv += io::format_double(row.theta) + "," + io::format_double(row.phi_mean) + "," +
               io::format_double(row.ci_low) + "," + io::format_double(row.ci_high);
        for (const double phi : row.phi_values) {
            csv += "," + io::format_double(phi);
        }
        csv += "\n";
    }
    io::write_text_file(cfg.output_dir / "sweep.csv", csv);
    if (cfg.emit_svg) {
        io::write_text_file(cfg.output_dir / "sweep.svg", io::render_sweep_svg(results));
    }

    for (const auto& row : results) {
        std::cout << "theta " << io::format_double(row.theta) << ": phi_mean "
                  << io::format_double(row.phi_mean) << " ci [" << io::format_double(row.ci_low)
                  << ", " << io::format_double(row.ci_high) << "]\n";
    }
    return 0;
}

// landscape.csv, long form: k, theta, prob, log10_prob.
inline int cmd_landscape(const CliConfig& cfg) {
    detail::ensure_output_dir(cfg.output_dir);

    std::vector<std::uint32_t> k_values(50);
    std::iota(k_values.begin(), k_values.end(), 1u);
    const LandscapeGrid grid = migration_landscape(k_values, cfg.theta_grid);

    std::string csv = "k,theta,prob,log10_prob\n";
    for (std::size_t i = 0; i < grid.k_values.size(); ++i) {
        for (std::size_t j = 0; j < grid.theta_values.size(); ++j) {
            csv += io::format_u64(grid.k_values[i]) + "," +
                   io::format_double(grid.theta_values[j]) + "," +
                   io::format_double(grid.probabilities[i][j]) + "," +
                   io::format_double(grid.log10_probabilities[i][j]) + "\n";
        }
    }
    io::write_text_file(cfg.output_dir / "landscape.csv", csv);
    if (cfg.emit_svg) {
        io::write_text_file(cfg.output_dir / "landscape.svg", io::render_landscape_svg(grid));
    }

    std::cout << "landscape: " << grid.k_values.size() << " k values x "
              << grid.theta_values.size() << " theta values\n";
    return 0;
}

// Exit codes: 0 success, 1 runtime/I-O failure, 2 usage error.
inline int run_cli(const std::vector<std::string>& args) {
    for (const auto& a : args) {
        if (a == "--help" || a == "-h") {
            std::cout << usage_text();
            return 0;
        }
    }
    try {
        const CliConfig cfg = parse_args(args);
        switch (cfg.command) {
            case Command::run:
                return cmd_run(cfg);
            case Command::sweep:
                return cmd_sweep(cfg);
            case Command::landscape:
                return cmd_landscape(cfg);
        }
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << usage_text();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace segsim::cli
