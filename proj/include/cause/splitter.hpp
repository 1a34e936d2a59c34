#pragma once

#include <cstdint>
#include <vector>

#include "cause/types.hpp"

namespace cause {

enum class Protocol : std::uint8_t { Reg, Skew };

inline const char* protocol_name(Protocol p) { return p == Protocol::Reg ? "reg" : "skew"; }

struct SplitConfig {
    std::uint64_t seed = 42;
    Protocol protocol = Protocol::Skew;
    double skew_test_pool = 0.30;          // uniform pool: test + treatment train
    double test_fraction = 0.20;
    double treatment_train_fraction = 0.10;
    double validation_fraction = 0.10;
    double move_cap = 0.9;                 // max per-event pool probability
    double propensity_cap = 10.0;          // max importance weight

    void validate() const {
        auto frac = [](double x) { return x > 0.0 && x < 1.0; };
        if (!frac(skew_test_pool) || !frac(test_fraction) || !frac(treatment_train_fraction) ||
            !frac(validation_fraction) || !frac(move_cap))
            throw Error(ErrorKind::ConfigError, "split fractions must lie in (0,1)");
        if (std::abs(test_fraction + treatment_train_fraction - skew_test_pool) > 1e-12)
            throw Error(ErrorKind::ConfigError,
                        "test_fraction + treatment_train_fraction must equal skew_test_pool");
        if (propensity_cap <= 0.0)
            throw Error(ErrorKind::ConfigError, "propensity cap must be positive");
    }
};

// Extra facts about how a skew split was realized, for the manifest.
struct SplitStats {
    double pool_scale = 0.0;   // multiplier applied to the acceptance probabilities
    std::size_t pool_size = 0;
};

// counts[j] = number of events on item j over the whole dataset.
std::vector<std::size_t> item_popularity(const Dataset& dataset);

// Per-item probability of moving an event into the uniform pool:
// min(c_min / count, move_cap) for items with events, 0 otherwise, where
// c_min is the smallest positive count.
std::vector<double> acceptance_probs(const std::vector<std::size_t>& counts, double move_cap);

// Laplace-smoothed popularity marginal for the logging policy, uniform
// treatment marginal, and the capped importance weight per item.
PropensityTable build_propensity(const std::vector<Interaction>& train_control,
                                 std::size_t n_items, double cap);

// Uniform-exposure simulation split: events enter a pool with the scaled
// acceptance probability of their item (expected pool size = skew_test_pool
// * N, individual probabilities still capped), the pool splits 2:1 into
// test / treatment train, and the remainder splits 6:1 into control train
// / validation.
SplitBundle skew_split(const Dataset& dataset, const SplitConfig& config,
                       SplitStats* stats = nullptr);

// Per-user 70/10/20 shuffle split. The treatment train set is empty; test
// events still carry the Treatment origin so downstream code paths match
// the skew protocol.
SplitBundle reg_split(const Dataset& dataset, const SplitConfig& config);

SplitBundle make_split(const Dataset& dataset, const SplitConfig& config,
                       SplitStats* stats = nullptr);

// Moves a seeded random `fraction`-of-total slice of train_control into
// train_treatment (origins updated, propensities rebuilt). Gives REG
// bundles an on-distribution stand-in for the exploration sample.
SplitBundle carve_treatment(const SplitBundle& bundle, double fraction, std::uint64_t seed,
                            std::size_t n_items, double propensity_cap);

}  // namespace cause
