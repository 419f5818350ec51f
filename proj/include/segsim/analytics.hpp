#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "segsim/errors.hpp"

namespace segsim {

// floor(x) with a snap: a value within 1e-9 of an integer is taken to *be*
// that integer. theta * k built from decimal theta can land on either side of
// the exact rational (0.3 * 10 may round below 3), and the threshold count
// must stay inclusive.
inline std::int64_t floor_with_snap(double x) {
    const double nearest = std::round(x);
    if (std::abs(x - nearest) < 1e-9) {
        return static_cast<std::int64_t>(nearest);
    }
    return static_cast<std::int64_t>(std::floor(x));
}

// Largest k whose binomial tail sum fits exactly in 64-bit integers.
inline constexpr std::uint32_t kMaxExactK = 62;

// Probability that an agent sampling k peers in a fully integrated (50/50)
// community sees at most floor(theta * k) similar opinions and therefore
// migrates: sum_{i=0}^{floor(theta k)} C(k, i) / 2^k. Computed as an exact
// dyadic rational; conversion to double happens once at the end.
inline double binomial_migration_prob(std::uint32_t k, double theta) {
    if (k == 0) {
        throw ParameterError("binomial_migration_prob: k must be >= 1");
    }
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw ParameterError("binomial_migration_prob: theta must be in [0, 1]");
    }
    if (k > kMaxExactK) {
        throw CapacityError("binomial_migration_prob: k exceeds exact-arithmetic limit of 62");
    }
    const std::int64_t m = floor_with_snap(theta * static_cast<double>(k));
    if (m >= static_cast<std::int64_t>(k)) {
        return 1.0;
    }
    std::uint64_t numerator = 0;
    std::uint64_t coeff = 1;  // C(k, i), updated multiplicatively
    for (std::int64_t i = 0; i <= m; ++i) {
        numerator += coeff;
        coeff = coeff * (k - static_cast<std::uint64_t>(i)) / (static_cast<std::uint64_t>(i) + 1);
    }
    return std::ldexp(static_cast<double>(numerator), -static_cast<int>(k));
}

// Independent route to the same number: enumerate all 2^k equally likely
// similar/dissimilar strings and count the migrating ones. Shares only the
// floor_with_snap boundary convention with the closed form.
inline double brute_force_migration_prob(std::uint32_t k, double theta) {
    if (k == 0) {
        throw ParameterError("brute_force_migration_prob: k must be >= 1");
    }
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw ParameterError("brute_force_migration_prob: theta must be in [0, 1]");
    }
    if (k > 24) {
        throw CapacityError("brute_force_migration_prob: enumeration capped at k = 24");
    }
    const std::int64_t m = floor_with_snap(theta * static_cast<double>(k));
    const std::uint64_t total = std::uint64_t{1} << k;
    std::uint64_t migrating = 0;
    for (std::uint64_t outcome = 0; outcome < total; ++outcome) {
        if (std::popcount(outcome) <= m) {
            ++migrating;
        }
    }
    return std::ldexp(static_cast<double>(migrating), -static_cast<int>(k));
}

// Migration probability over a (k, theta) grid, with a log10 view.
struct LandscapeGrid {
    std::vector<std::uint32_t> k_values;
    std::vector<double> theta_values;
    std::vector<std::vector<double>> probabilities;        // [i][j] = (k_i, theta_j)
    std::vector<std::vector<double>> log10_probabilities;  // -inf where p == 0
};

inline LandscapeGrid migration_landscape(std::vector<std::uint32_t> k_values,
                                         std::vector<double> theta_values) {
    if (k_values.empty() || theta_values.empty()) {
        throw ParameterError("migration_landscape: axes must be non-empty");
    }
    for (std::size_t i = 1; i < k_values.size(); ++i) {
        if (k_values[i] <= k_values[i - 1]) {
            throw ParameterError("migration_landscape: k_values must be strictly ascending");
        }
    }
    for (std::size_t j = 1; j < theta_values.size(); ++j) {
        if (theta_values[j] <= theta_values[j - 1]) {
            throw ParameterError("migration_landscape: theta_values must be strictly ascending");
        }
    }
    LandscapeGrid grid;
    grid.k_values = std::move(k_values);
    grid.theta_values = std::move(theta_values);
    grid.probabilities.resize(grid.k_values.size());
    grid.log10_probabilities.resize(grid.k_values.size());
    for (std::size_t i = 0; i < grid.k_values.size(); ++i) {
        auto& row = grid.probabilities[i];
        auto& log_row = grid.log10_probabilities[i];
        row.resize(grid.theta_values.size());
        log_row.resize(grid.theta_values.size());
        for (std::size_t j = 0; j < grid.theta_values.size(); ++j) {
            const double p = binomial_migration_prob(grid.k_values[i], grid.theta_values[j]);
            row[j] = p;
            log_row[j] = p > 0.0 ? std::log10(p) : -std::numeric_limits<double>::infinity();
        }
    }
    return grid;
}

}  // namespace segsim
