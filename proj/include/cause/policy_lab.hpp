#pragma once

#include <cstdint>
#include <vector>

#include "cause/error.hpp"
#include "cause/rng.hpp"

namespace cause {

// Small explicit world for exercising the policy/treatment-effect
// definitions by enumeration and Monte Carlo: Bernoulli reward means per
// user-item pair plus a user arrival distribution.
struct SynthWorld {
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::vector<double> reward;     // row-major n_users x n_items, means in [0,1]
    std::vector<double> user_prob;  // sums to 1

    double r(std::size_t u, std::size_t i) const { return reward[u * n_items + i]; }

    void check() const;

    // Appends one item with zero reward everywhere, modelling "show
    // nothing" as a valid intervention.
    SynthWorld with_null_item() const;
};

// Stochastic exposure policy: row-stochastic matrix pi(item | user).
struct Policy {
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::vector<double> expose;  // row-major

    double p(std::size_t u, std::size_t i) const { return expose[u * n_items + i]; }

    void check() const;

    static Policy uniform(std::size_t n_users, std::size_t n_items);
    // Deterministic one-item-per-user policy.
    static Policy deterministic(std::size_t n_users, std::size_t n_items,
                                const std::vector<std::size_t>& item_per_user);
    // User-independent exposure proportional to weights[j]^beta.
    static Policy popularity(std::size_t n_users, const std::vector<double>& weights,
                             double beta);
};

struct LoggedEvent {
    std::size_t user = 0;
    std::size_t item = 0;
    double outcome = 0.0;        // realized Bernoulli reward
    double logging_prob = 0.0;   // pi_c(item | user) at logging time
};

using LoggedSample = std::vector<LoggedEvent>;

// Exact expected reward: sum_ij r_ij * pi(j|i) * p(u_i).
double policy_reward(const SynthWorld& world, const Policy& policy);

// Total treatment effect of `policy` against `control`: the summed
// per-pair reward differences, equal to the difference of total rewards.
double ite(const SynthWorld& world, const Policy& policy, const Policy& control);

// Deterministic argmax-reward policy; ties go to the lowest item index.
Policy best_policy(const SynthWorld& world);

// Draws n events: user from user_prob, item from the logging policy,
// outcome from the Bernoulli reward mean.
LoggedSample sample_logged(const SynthWorld& world, const Policy& logging, std::size_t n,
                           Rng& rng);

// Importance-weighted reward estimate of `target` from data logged under
// another policy: mean of outcome * pi_target / pi_logging.
double ips_estimate(const LoggedSample& sample, const Policy& target);

// Same estimate plus its Monte Carlo standard error.
struct IpsResult {
    double estimate = 0.0;
    double std_error = 0.0;
};
IpsResult ips_estimate_with_se(const LoggedSample& sample, const Policy& target);

// Checks, per user, that ranking expected outcomes under uniform
// exposure divided by the uniform exposure probability recovers the
// best-reward item, and that the same holds for outcomes logged under
// `control` divided by the control propensities. Ties resolve to the
// lowest index on both sides.
bool argmax_rand_equivalence(const SynthWorld& world, const Policy& control);

}  // namespace cause
