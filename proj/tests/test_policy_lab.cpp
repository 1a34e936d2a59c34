#include <doctest.h>

#include <cmath>

#include "cause/policy_lab.hpp"
#include "testutil.hpp"

using namespace cause;

namespace {

SynthWorld identity_world() {
    SynthWorld w;
    w.n_users = 2;
    w.n_items = 2;
    w.reward = {1, 0, 0, 1};
    w.user_prob = {0.5, 0.5};
    return w;
}

SynthWorld random_world(std::size_t n_users, std::size_t n_items, Rng& rng) {
    SynthWorld w;
    w.n_users = n_users;
    w.n_items = n_items;
    w.reward.resize(n_users * n_items);
    for (auto& r : w.reward) r = rng.uniform();
    w.user_prob.resize(n_users);
    double total = 0.0;
    for (auto& p : w.user_prob) {
        p = 0.2 + rng.uniform();
        total += p;
    }
    for (auto& p : w.user_prob) p /= total;
    return w;
}

Policy random_policy(std::size_t n_users, std::size_t n_items, Rng& rng) {
    Policy pi;
    pi.n_users = n_users;
    pi.n_items = n_items;
    pi.expose.resize(n_users * n_items);
    for (std::size_t u = 0; u < n_users; ++u) {
        double total = 0.0;
        for (std::size_t i = 0; i < n_items; ++i) {
            pi.expose[u * n_items + i] = 0.05 + rng.uniform();
            total += pi.expose[u * n_items + i];
        }
        for (std::size_t i = 0; i < n_items; ++i) pi.expose[u * n_items + i] /= total;
    }
    return pi;
}

}  // namespace

TEST_CASE("exact policy reward on the identity world") {
    SynthWorld w = identity_world();
    CHECK(policy_reward(w, Policy::uniform(2, 2)) == doctest::Approx(0.5));
    CHECK(policy_reward(w, best_policy(w)) == doctest::Approx(1.0));

    // mass on a zero-reward column earns nothing
    Policy bad = Policy::deterministic(2, 2, {1, 0});
    CHECK(policy_reward(w, bad) == doctest::Approx(0.0));
}

TEST_CASE("treatment effect is a reward difference and antisymmetric") {
    SynthWorld w = identity_world();
    Policy uni = Policy::uniform(2, 2);
    Policy best = best_policy(w);
    CHECK(ite(w, uni, uni) == 0.0);
    CHECK(ite(w, best, uni) == doctest::Approx(0.5));
    Rng rng(12);
    Policy a = random_policy(2, 2, rng), b = random_policy(2, 2, rng);
    CHECK(ite(w, a, b) == doctest::Approx(-ite(w, b, a)).epsilon(1e-12));
}

TEST_CASE("best_policy picks per-user argmax with lowest-index ties") {
    SynthWorld w;
    w.n_users = 2;
    w.n_items = 2;
    w.reward = {0.2, 0.9, 0.5, 0.5};
    w.user_prob = {0.5, 0.5};
    Policy best = best_policy(w);
    CHECK(best.p(0, 1) == 1.0);
    CHECK(best.p(1, 0) == 1.0);  // tie resolves to item 0
}

TEST_CASE("reward is linear in the policy matrix") {
    Rng rng(81);
    SynthWorld w = random_world(3, 4, rng);
    Policy a = random_policy(3, 4, rng), b = random_policy(3, 4, rng);
    for (double alpha : {0.0, 0.25, 0.7, 1.0}) {
        Policy mix = a;
        for (std::size_t i = 0; i < mix.expose.size(); ++i)
            mix.expose[i] = alpha * a.expose[i] + (1.0 - alpha) * b.expose[i];
        double want = alpha * policy_reward(w, a) + (1.0 - alpha) * policy_reward(w, b);
        CHECK(policy_reward(w, mix) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("best_policy dominates deterministic and random policies on grid worlds") {
    // exhaustive over 2-user x 2-item worlds with rewards on {0, 1/2, 1};
    // the acceptance suite extends this to the full 3x3 grid
    const double grid[3] = {0.0, 0.5, 1.0};
    Rng rng(5);
    for (int code = 0; code < 81; ++code) {
        SynthWorld w;
        w.n_users = 2;
        w.n_items = 2;
        int c = code;
        w.reward.resize(4);
        for (auto& r : w.reward) {
            r = grid[c % 3];
            c /= 3;
        }
        w.user_prob = {0.5, 0.5};
        double best = policy_reward(w, best_policy(w));
        for (std::size_t i0 = 0; i0 < 2; ++i0)
            for (std::size_t i1 = 0; i1 < 2; ++i1) {
                Policy det = Policy::deterministic(2, 2, {i0, i1});
                CHECK(best >= policy_reward(w, det) - 1e-12);
            }
        for (int t = 0; t < 20; ++t) {
            Policy pi = random_policy(2, 2, rng);
            CHECK(best >= policy_reward(w, pi) - 1e-12);
        }
    }
}

TEST_CASE("ips formula on single events") {
    Policy target;
    target.n_users = 1;
    target.n_items = 2;
    target.expose = {0.25, 0.75};
    LoggedSample sample = {{0, 0, 1.0, 0.5}};
    CHECK(ips_estimate(sample, target) == doctest::Approx(0.5));

    LoggedSample zero = {{0, 0, 1.0, 0.0}};
    CHECK_THROWS_AS(ips_estimate(zero, target), Error);
}

TEST_CASE("ips of the logging policy itself averages the outcomes") {
    Rng rng(31);
    SynthWorld w = random_world(3, 4, rng);
    Policy logging = random_policy(3, 4, rng);
    LoggedSample sample = sample_logged(w, logging, 5000, rng);
    double mean_y = 0.0;
    for (const auto& ev : sample) mean_y += ev.outcome;
    mean_y /= static_cast<double>(sample.size());
    CHECK(ips_estimate(sample, logging) == doctest::Approx(mean_y).epsilon(1e-12));
}

TEST_CASE("ips is unbiased within monte carlo error") {
    Rng rng(42);
    for (int trial = 0; trial < 4; ++trial) {
        SynthWorld w = random_world(4, 4, rng);
        Policy logging = random_policy(4, 4, rng);
        Policy target = random_policy(4, 4, rng);
        LoggedSample sample = sample_logged(w, logging, 60000, rng);
        IpsResult est = ips_estimate_with_se(sample, target);
        double exact = policy_reward(w, target);
        CHECK(std::fabs(est.estimate - exact) < 3.0 * est.std_error + 1e-9);
    }
}

TEST_CASE("ips variance grows as the logging policy skews") {
    Rng rng(7);
    SynthWorld w = random_world(4, 4, rng);
    Policy target = Policy::uniform(4, 4);
    std::vector<double> pop = {1.0, 2.0, 4.0, 8.0};
    double prev_var = -1.0;
    for (double beta : {0.0, 1.0, 2.0, 3.0}) {
        Policy logging = Policy::popularity(4, pop, beta);
        double sum = 0.0, sum_sq = 0.0;
        const int reps = 200;
        for (int rep = 0; rep < reps; ++rep) {
            LoggedSample sample = sample_logged(w, logging, 800, rng);
            double est = ips_estimate(sample, target);
            sum += est;
            sum_sq += est * est;
        }
        double var = sum_sq / reps - (sum / reps) * (sum / reps);
        CHECK(var > prev_var);
        prev_var = var;
    }
}

TEST_CASE("ranking corrected outcomes recovers the best item") {
    SynthWorld w = identity_world();
    Rng rng(3);
    CHECK(argmax_rand_equivalence(w, random_policy(2, 2, rng)));

    SynthWorld tied;
    tied.n_users = 1;
    tied.n_items = 3;
    tied.reward = {0.5, 0.5, 0.2};
    tied.user_prob = {1.0};
    CHECK(argmax_rand_equivalence(tied, Policy::uniform(1, 3)));

    Rng rng2(9);
    for (int t = 0; t < 10; ++t) {
        SynthWorld rw = random_world(3, 5, rng2);
        CHECK(argmax_rand_equivalence(rw, random_policy(3, 5, rng2)));
    }
}

TEST_CASE("the null item models showing nothing") {
    SynthWorld w = identity_world().with_null_item();
    CHECK(w.n_items == 3);
    CHECK(w.r(0, 2) == 0.0);
    CHECK(w.r(1, 2) == 0.0);
    // exposing everyone to the null item earns nothing
    Policy null_only = Policy::deterministic(2, 3, {2, 2});
    CHECK(policy_reward(w, null_only) == 0.0);
}

TEST_CASE("world and policy validation") {
    SynthWorld w = identity_world();
    w.user_prob = {0.9, 0.3};
    CHECK_THROWS_AS(w.check(), Error);
    Policy p = Policy::uniform(2, 2);
    p.expose[0] = 0.9;
    CHECK_THROWS_AS(p.check(), Error);
    SynthWorld tiny;
    tiny.n_users = 1;
    tiny.n_items = 1;
    tiny.reward = {1.0};
    tiny.user_prob = {1.0};
    CHECK_THROWS_AS(tiny.check(), Error);
}
