#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "segsim/errors.hpp"
#include "segsim/rng.hpp"

namespace segsim {

inline constexpr std::uint64_t kDefaultSeed = 123456789;

// Free parameters of one simulation run.
struct ModelParams {
    std::uint32_t n_agents = 100;
    std::uint32_t n_communities = 20;
    std::uint32_t k_interactors = 10;
    double theta = 0.2;             // tolerance threshold
    std::uint64_t max_steps = 100000;
    std::uint64_t seed = kDefaultSeed;
    bool balanced_init = true;      // exact 50/50 split vs fair coin per agent
};

// theta < 0 is accepted and freezes the dynamics (nobody ever moves);
// theta > 1 and NaN are rejected.
inline void validate(const ModelParams& p) {
    if (p.n_agents < 2) {
        throw ParameterError("n_agents must be >= 2");
    }
    if (p.n_communities < 2) {
        throw ParameterError("n_communities must be >= 2");
    }
    if (p.k_interactors < 1) {
        throw ParameterError("k_interactors must be >= 1");
    }
    if (!(p.theta <= 1.0)) {
        throw ParameterError("theta must be <= 1");
    }
}

// Agents of equal (community, opinion) are interchangeable, so per-community
// opinion counts are the whole state.
struct ModelState {
    std::vector<std::array<std::uint32_t, 2>> counts;  // counts[c][o]
    std::uint64_t step = 0;

    bool operator==(const ModelState&) const = default;

    std::uint32_t n_communities() const {
        return static_cast<std::uint32_t>(counts.size());
    }
    std::uint32_t community_size(std::uint32_t c) const {
        return counts[c][0] + counts[c][1];
    }
    std::uint32_t total_agents() const {
        std::uint32_t n = 0;
        for (const auto& cell : counts) {
            n += cell[0] + cell[1];
        }
        return n;
    }
    // Per-opinion population; constant over a run since opinions never change.
    std::array<std::uint32_t, 2> opinion_totals() const {
        std::array<std::uint32_t, 2> t{0, 0};
        for (const auto& cell : counts) {
            t[0] += cell[0];
            t[1] += cell[1];
        }
        return t;
    }
};

struct FocalAgent {
    std::uint32_t community = 0;
    std::uint8_t opinion = 0;
};

struct InteractionSample {
    std::uint32_t k_effective = 0;   // min(k, community size - 1)
    std::uint32_t similar_count = 0;
};

// Record of one focal-agent event.
struct StepOutcome {
    std::uint32_t focal_community = 0;
    std::uint8_t focal_opinion = 0;
    std::uint32_t k_effective = 0;
    std::uint32_t similar_count = 0;
    std::optional<double> similarity_share;   // empty when k_effective == 0
    bool moved = false;
    std::optional<std::uint32_t> destination; // empty when not moved

    bool operator==(const StepOutcome&) const = default;
};

// Every agent gets a uniform-random community; opinions per balanced_init.
inline ModelState init_state(const ModelParams& p, RngEngine& rng) {
    validate(p);
    std::vector<std::uint8_t> opinions(p.n_agents);
    if (p.balanced_init) {
        // Exact split: ceil(N/2) zeros, floor(N/2) ones, Fisher-Yates shuffled.
        for (std::uint32_t i = 0; i < p.n_agents; ++i) {
            opinions[i] = (i < (p.n_agents + 1) / 2) ? 0 : 1;
        }
        for (std::uint32_t i = p.n_agents - 1; i > 0; --i) {
            const auto j = static_cast<std::uint32_t>(uniform_below(rng, i + 1));
            std::swap(opinions[i], opinions[j]);
        }
    } else {
        for (auto& o : opinions) {
            o = static_cast<std::uint8_t>(uniform_below(rng, 2));
        }
    }
    ModelState s;
    s.counts.assign(p.n_communities, {0, 0});
    for (const auto o : opinions) {
        const auto c = static_cast<std::uint32_t>(uniform_below(rng, p.n_communities));
        ++s.counts[c][o];
    }
    return s;
}

// Uniform over agents: P(c, o) = counts[c][o] / N.
inline FocalAgent select_focal(const ModelState& s, RngEngine& rng) {
    const std::uint32_t total = s.total_agents();
    if (total == 0) {
        throw StateError("select_focal: state has no agents");
    }
    auto r = uniform_below(rng, total);
    for (std::uint32_t c = 0; c < s.n_communities(); ++c) {
        for (std::uint8_t o = 0; o < 2; ++o) {
            if (r < s.counts[c][o]) {
                return {c, o};
            }
            r -= s.counts[c][o];
        }
    }
    throw StateError("select_focal: counts inconsistent with total");
}

// Draws min(k, n_c - 1) distinct peers from the focal community without
// replacement; similar_count is exactly hypergeometric in the community's
// other members.
inline InteractionSample sample_interactors(const ModelState& s, FocalAgent focal,
                                            std::uint32_t k, RngEngine& rng) {
    if (focal.community >= s.n_communities() || s.counts[focal.community][focal.opinion] == 0) {
        throw StateError("sample_interactors: focal agent not present in state");
    }
    const std::uint32_t n_c = s.community_size(focal.community);
    std::uint32_t remaining_same = s.counts[focal.community][focal.opinion] - 1;
    std::uint32_t remaining = n_c - 1;
    const std::uint32_t k_eff = std::min(k, remaining);

    std::uint32_t similar = 0;
    for (std::uint32_t i = 0; i < k_eff; ++i) {
        if (uniform_below(rng, remaining) < remaining_same) {
            ++similar;
            --remaining_same;
        }
        --remaining;
    }
    return {k_eff, similar};
}

// f <= theta with the division cleared: similar <= theta * k, boundary
// inclusive, no tolerance. An agent with no interactors stays put.
inline bool decide_move(std::uint32_t similar_count, std::uint32_t k_effective, double theta) {
    if (k_effective == 0) {
        return false;
    }
    return static_cast<double>(similar_count) <= theta * static_cast<double>(k_effective);
}

// Moves the focal agent to a uniform-random community other than its own.
// Returns the destination.
inline std::uint32_t relocate(ModelState& s, FocalAgent focal, RngEngine& rng) {
    if (focal.community >= s.n_communities() || s.counts[focal.community][focal.opinion] == 0) {
        throw StateError("relocate: focal agent not present in state");
    }
    auto d = static_cast<std::uint32_t>(uniform_below(rng, s.n_communities() - 1));
    if (d >= focal.community) {
        ++d;
    }
    --s.counts[focal.community][focal.opinion];
    ++s.counts[d][focal.opinion];
    return d;
}

// One focal-agent event: select, sample, decide, optionally relocate.
inline StepOutcome step(ModelState& s, const ModelParams& p, RngEngine& rng) {
    const FocalAgent focal = select_focal(s, rng);
    const InteractionSample sample = sample_interactors(s, focal, p.k_interactors, rng);

    StepOutcome out;
    out.focal_community = focal.community;
    out.focal_opinion = focal.opinion;
    out.k_effective = sample.k_effective;
    out.similar_count = sample.similar_count;
    if (sample.k_effective > 0) {
        out.similarity_share = static_cast<double>(sample.similar_count) /
                               static_cast<double>(sample.k_effective);
    }
    if (decide_move(sample.similar_count, sample.k_effective, p.theta)) {
        out.moved = true;
        out.destination = relocate(s, focal, rng);
    }
    ++s.step;
    return out;
}

// Called with (step index, state snapshot) at step 0, every stride steps, and
// at the final step.
using Observer = std::function<void(std::uint64_t, const ModelState&)>;

// Runs max_steps focal-agent events from a fresh init_state. The trajectory
// is a pure function of (params, seed).
inline ModelState run(const ModelParams& p, const Observer& observer = {},
                      std::uint64_t record_stride = 100) {
    validate(p);
    if (record_stride == 0) {
        throw ParameterError("record_stride must be >= 1");
    }
    RngEngine rng(p.seed);
    ModelState s = init_state(p, rng);
    if (observer) {
        observer(0, s);
    }
    for (std::uint64_t t = 1; t <= p.max_steps; ++t) {
        step(s, p, rng);
        if (observer && (t % record_stride == 0 || t == p.max_steps)) {
            observer(t, s);
        }
    }
    return s;
}

}  // namespace segsim
