#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "segsim/errors.hpp"
#include "segsim/model.hpp"

namespace segsim {

struct SegregationReading {
    double phi = 0.0;                        // in [0, 0.5]; 0 = fully sorted
    double homophily = 1.0;                  // 1 - phi
    double homogeneous_agent_fraction = 0.0; // agents in opinion-pure communities
};

// phi = sum_c (n_c / N) * 2 p_c (1 - p_c): pick a random agent, then a random
// member of its community with replacement, and ask for opposing opinions.
// The with-replacement form makes random mixing exactly 0.5 regardless of
// community size.
inline double disagreement_phi(const ModelState& s) {
    double acc = 0.0;
    std::uint64_t population = 0;
    for (const auto& cell : s.counts) {
        const std::uint32_t n_c = cell[0] + cell[1];
        if (n_c == 0) {
            continue;
        }
        population += n_c;
        const double p = static_cast<double>(cell[1]) / n_c;
        acc += static_cast<double>(n_c) * 2.0 * p * (1.0 - p);
    }
    if (population == 0) {
        throw MetricError("disagreement_phi: all communities are empty");
    }
    return acc / static_cast<double>(population);
}

// Alternate form where the partner is a *different* member of the community.
// Exceeds 0.5 for small balanced communities (5/9 at n_c = 10); kept as a
// sensitivity check. Singletons contribute zero disagreement.
inline double disagreement_phi_distinct_pairs(const ModelState& s) {
    double acc = 0.0;
    std::uint64_t population = 0;
    for (const auto& cell : s.counts) {
        const std::uint32_t n_c = cell[0] + cell[1];
        if (n_c == 0) {
            continue;
        }
        population += n_c;
        if (n_c >= 2) {
            const double pairs = static_cast<double>(n_c) * (n_c - 1.0);
            acc += static_cast<double>(n_c) *
                   (2.0 * static_cast<double>(cell[0]) * static_cast<double>(cell[1]) / pairs);
        }
    }
    if (population == 0) {
        throw MetricError("disagreement_phi_distinct_pairs: all communities are empty");
    }
    return acc / static_cast<double>(population);
}

// Mean opinion per community; empty communities yield nullopt.
inline std::vector<std::optional<double>> community_opinion_means(const ModelState& s) {
    std::vector<std::optional<double>> means(s.counts.size());
    for (std::size_t c = 0; c < s.counts.size(); ++c) {
        const std::uint32_t n_c = s.counts[c][0] + s.counts[c][1];
        if (n_c > 0) {
            means[c] = static_cast<double>(s.counts[c][1]) / n_c;
        }
    }
    return means;
}

inline double homogeneous_agent_fraction(const ModelState& s) {
    std::uint64_t population = 0;
    std::uint64_t pure = 0;
    for (const auto& cell : s.counts) {
        const std::uint32_t n_c = cell[0] + cell[1];
        population += n_c;
        if (n_c > 0 && (cell[0] == 0 || cell[1] == 0)) {
            pure += n_c;
        }
    }
    if (population == 0) {
        throw MetricError("homogeneous_agent_fraction: all communities are empty");
    }
    return static_cast<double>(pure) / static_cast<double>(population);
}

inline SegregationReading segregation_reading(const ModelState& s) {
    const double phi = disagreement_phi(s);
    return {phi, 1.0 - phi, homogeneous_agent_fraction(s)};
}

// The verbatim trigger rule "phi > theta". Fires for any random mixture once
// theta < 0.5, so it mostly serves as a fidelity reference.
inline bool schelling_effect_literal(double phi, double theta) {
    return phi > theta;
}

// Schelling effect = observed same-opinion interaction probability exceeds
// both the agents' demand theta and the random-mixing baseline by a margin.
inline bool schelling_effect_flag(const SegregationReading& reading, double theta,
                                  double margin = 0.05) {
    return reading.homophily > theta && reading.homophily > 0.5 + margin;
}

}  // namespace segsim
