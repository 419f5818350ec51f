#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "segsim/errors.hpp"
#include "segsim/metrics.hpp"
#include "segsim/model.hpp"
#include "segsim/rng.hpp"

namespace segsim {

struct SweepConfig {
    ModelParams base;                 // theta is ignored; seed is the master seed
    std::vector<double> theta_values; // ascending, in [0, 1]
    std::uint32_t replicates = 10;
    std::uint64_t record_stride = 100;
};

struct SweepResult {
    double theta = 0.0;
    std::vector<double> phi_values;   // one final phi per replicate
    double phi_mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::vector<std::uint64_t> seeds; // audit trail

    bool operator==(const SweepResult&) const = default;
};

struct TimeSeries {
    std::vector<std::uint64_t> steps;
    std::vector<std::vector<std::optional<double>>> community_means; // row per step
    std::vector<double> phi_trace;
};

// Nested avalanche mix of (master, theta index, replicate index), so any
// sweep cell can be re-run in isolation without drawing the others.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t theta_index,
                                 std::uint64_t replicate_index) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ mix64(theta_index));
    h = mix64(h ^ mix64(replicate_index));
    return h;
}

namespace detail {

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
inline double ibeta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) {
        d = tiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) {
            break;
        }
    }
    return h;
}

inline double regularized_ibeta(double a, double b, double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * ibeta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * ibeta_continued_fraction(b, a, 1.0 - x) / b;
}

inline double student_t_cdf(double t, double df) {
    const double x = df / (df + t * t);
    const double tail = 0.5 * regularized_ibeta(0.5 * df, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

// Quantile by bisection on the CDF; plenty fast for the few calls a sweep
// makes and monotone-safe for any df >= 1.
inline double student_t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) {
        throw ParameterError("student_t_quantile: p must be in (0, 1)");
    }
    if (!(df >= 1.0)) {
        throw ParameterError("student_t_quantile: df must be >= 1");
    }
    if (p == 0.5) {
        return 0.0;
    }
    const bool upper = p > 0.5;
    const double target = upper ? p : 1.0 - p;
    double lo = 0.0;
    double hi = 1.0;
    while (student_t_cdf(hi, df) < target) {
        hi *= 2.0;
        if (hi > 1e300) {
            break;
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-13 * std::max(1.0, hi)) {
            break;
        }
    }
    const double q = 0.5 * (lo + hi);
    return upper ? q : -q;
}

}  // namespace detail

// Student-t interval: mean +/- t_{(1+level)/2, n-1} * sd / sqrt(n).
inline std::pair<double, double> confidence_interval(std::span<const double> values,
                                                     double level) {
    if (values.size() < 2) {
        throw StatisticsError("confidence_interval: need at least 2 values");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw ParameterError("confidence_interval: level must be in (0, 1)");
    }
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (const double v : values) {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (const double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd == 0.0) {
        return {mean, mean};
    }
    const double t = detail::student_t_quantile(0.5 * (1.0 + level), n - 1.0);
    const double half_width = t * sd / std::sqrt(n);
    return {mean - half_width, mean + half_width};
}

// One run with community means and phi captured at the stride, step 0, and
// the final step.
inline TimeSeries run_single(const ModelParams& params, std::uint64_t record_stride) {
    TimeSeries series;
    run(
        params,
        [&series](std::uint64_t t, const ModelState& s) {
            series.steps.push_back(t);
            series.community_means.push_back(community_opinion_means(s));
            series.phi_trace.push_back(disagreement_phi(s));
        },
        record_stride);
    return series;
}

// Aggregates one sweep cell's replicate values into a result row.
inline SweepResult make_sweep_result(double theta, std::vector<double> phi_values,
                                     std::vector<std::uint64_t> seeds, double level = 0.95) {
    SweepResult r;
    r.theta = theta;
    r.phi_values = std::move(phi_values);
    r.seeds = std::move(seeds);
    double mean = 0.0;
    for (const double v : r.phi_values) {
        mean += v;
    }
    r.phi_mean = mean / static_cast<double>(r.phi_values.size());
    const auto [lo, hi] = confidence_interval(r.phi_values, level);
    r.ci_low = lo;
    r.ci_high = hi;
    return r;
}

// Runs replicates for every theta with seeds derived from (master seed, theta
// index, replicate index). Replicates execute on up to n_workers threads;
// results are keyed by cell index, so the table is identical for any worker
// count or schedule.
inline std::vector<SweepResult> run_sweep(const SweepConfig& config, unsigned n_workers = 1) {
    {
        ModelParams probe = config.base;
        probe.theta = 0.0;  // base theta is ignored
        validate(probe);
    }
    if (config.theta_values.empty()) {
        throw ParameterError("run_sweep: theta_values must be non-empty");
    }
    for (std::size_t i = 0; i < config.theta_values.size(); ++i) {
        const double th = config.theta_values[i];
        if (!(th >= 0.0 && th <= 1.0)) {
            throw ParameterError("run_sweep: theta values must be in [0, 1]");
        }
        if (i > 0 && th <= config.theta_values[i - 1]) {
            throw ParameterError("run_sweep: theta values must be strictly ascending");
        }
    }
    if (config.replicates < 2) {
        throw ParameterError("run_sweep: replicates must be >= 2 for confidence intervals");
    }

    const std::size_t n_theta = config.theta_values.size();
    const std::size_t cells = n_theta * config.replicates;
    std::vector<std::uint64_t> seeds(cells);
    std::vector<double> phis(cells, 0.0);
    for (std::size_t i = 0; i < n_theta; ++i) {
        for (std::uint32_t j = 0; j < config.replicates; ++j) {
            seeds[i * config.replicates + j] = derive_seed(config.base.seed, i, j);
        }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure_message;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t cell = next.fetch_add(1);
            if (cell >= cells || failed.load()) {
                return;
            }
            const std::size_t i = cell / config.replicates;
            const std::size_t j = cell % config.replicates;
            ModelParams params = config.base;
            params.theta = config.theta_values[i];
            params.seed = seeds[cell];
            try {
                phis[cell] = disagreement_phi(run(params));
            } catch (const std::exception& e) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failed.exchange(true)) {
                    failure_message = "run_sweep: replicate failed (theta=" +
                                      std::to_string(config.theta_values[i]) +
                                      ", replicate=" + std::to_string(j) +
                                      ", seed=" + std::to_string(seeds[cell]) + "): " + e.what();
                }
            }
        }
    };

    const unsigned spawn = std::max(1u, n_workers);
    if (spawn == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(spawn);
        for (unsigned w = 0; w < spawn; ++w) {
            threads.emplace_back(worker);
        }
        for (auto& th : threads) {
            th.join();
        }
    }
    if (failed.load()) {
        throw StateError(failure_message);
    }

    std::vector<SweepResult> results;
    results.reserve(n_theta);
    for (std::size_t i = 0; i < n_theta; ++i) {
        const auto begin = seeds.begin() + static_cast<std::ptrdiff_t>(i * config.replicates);
        const auto pbegin = phis.begin() + static_cast<std::ptrdiff_t>(i * config.replicates);
        results.push_back(make_sweep_result(
            config.theta_values[i],
            std::vector<double>(pbegin, pbegin + config.replicates),
            std::vector<std::uint64_t>(begin, begin + config.replicates)));
    }
    return results;
}

}  // namespace segsim
