#include "cause/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cause/rng.hpp"

namespace cause {

std::vector<std::size_t> item_popularity(const Dataset& dataset) {
    if (dataset.interactions.empty())
        throw Error(ErrorKind::EmptyInput, "item_popularity on empty dataset");
    std::vector<std::size_t> counts(dataset.n_items, 0);
    for (const auto& ev : dataset.interactions) ++counts[ev.item];
    return counts;
}

std::vector<double> acceptance_probs(const std::vector<std::size_t>& counts, double move_cap) {
    std::size_t c_min = std::numeric_limits<std::size_t>::max();
    for (auto c : counts)
        if (c > 0) c_min = std::min(c_min, c);
    if (c_min == std::numeric_limits<std::size_t>::max())
        throw Error(ErrorKind::EmptyInput, "acceptance_probs needs at least one positive count");
    std::vector<double> probs(counts.size(), 0.0);
    for (std::size_t j = 0; j < counts.size(); ++j)
        if (counts[j] > 0)
            probs[j] = std::min(static_cast<double>(c_min) / static_cast<double>(counts[j]),
                                move_cap);
    return probs;
}

PropensityTable build_propensity(const std::vector<Interaction>& train_control,
                                 std::size_t n_items, double cap) {
    if (train_control.empty())
        throw Error(ErrorKind::EmptyInput, "build_propensity on empty control train set");
    std::vector<std::size_t> counts(n_items, 0);
    for (const auto& ev : train_control) ++counts[ev.item];

    PropensityTable table;
    table.control_prob.resize(n_items);
    table.treatment_prob.assign(n_items, 1.0 / static_cast<double>(n_items));
    table.weight.resize(n_items);
    const double denom = static_cast<double>(train_control.size() + n_items);
    for (std::size_t j = 0; j < n_items; ++j) {
        table.control_prob[j] = (static_cast<double>(counts[j]) + 1.0) / denom;
        table.weight[j] = std::min(table.treatment_prob[j] / table.control_prob[j], cap);
    }
    return table;
}

namespace {

// Scale factor s such that sum over events of min(s*p_item, cap) hits the
// target pool size. The sum is piecewise linear and nondecreasing in s.
double solve_pool_scale(const std::vector<std::size_t>& counts, const std::vector<double>& probs,
                        double cap, double target) {
    auto expected = [&](double s) {
        double sum = 0.0;
        for (std::size_t j = 0; j < counts.size(); ++j)
            if (counts[j] > 0)
                sum += static_cast<double>(counts[j]) * std::min(s * probs[j], cap);
        return sum;
    };
    double lo = 0.0, hi = 1.0;
    while (expected(hi) < target) {
        hi *= 2.0;
        if (hi > 1e18) return hi;  // saturated: every event at cap
    }
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        (expected(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

SplitBundle skew_split(const Dataset& dataset, const SplitConfig& config, SplitStats* stats) {
    config.validate();
    if (config.protocol != Protocol::Skew)
        throw Error(ErrorKind::ConfigError, "skew_split requires protocol=skew");
    const auto& events = dataset.interactions;
    const std::size_t n = events.size();
    if (n == 0) throw Error(ErrorKind::EmptyInput, "skew_split on empty dataset");

    auto counts = item_popularity(dataset);
    auto probs = acceptance_probs(counts, config.move_cap);
    const double target = config.skew_test_pool * static_cast<double>(n);
    const double scale = solve_pool_scale(counts, probs, config.move_cap, target);

    Rng pool_rng(config.seed, "split.pool");
    std::vector<std::uint32_t> pool, rest;
    pool.reserve(static_cast<std::size_t>(target * 1.1));
    rest.reserve(n);
    for (std::uint32_t idx = 0; idx < n; ++idx) {
        double p = std::min(scale * probs[events[idx].item], config.move_cap);
        (pool_rng.bernoulli(p) ? pool : rest).push_back(idx);
    }
    if (pool.empty()) throw Error(ErrorKind::DegeneratePool, "uniform pool came out empty");

    Rng part_rng(config.seed, "split.pool_partition");
    part_rng.shuffle(pool);
    Rng rest_rng(config.seed, "split.rest_partition");
    rest_rng.shuffle(rest);

    const std::size_t n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(pool.size()) * config.test_fraction /
                     config.skew_test_pool));
    const double rest_frac = 1.0 - config.skew_test_pool;
    const std::size_t n_valid = static_cast<std::size_t>(
        std::llround(static_cast<double>(rest.size()) * config.validation_fraction / rest_frac));

    SplitBundle bundle;
    auto take = [&](const std::vector<std::uint32_t>& src, std::size_t lo, std::size_t hi,
                    std::vector<Interaction>& dst, Origin origin) {
        dst.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            Interaction ev = events[src[i]];
            ev.origin = origin;
            dst.push_back(ev);
        }
    };
    take(pool, 0, std::min(n_test, pool.size()), bundle.test, Origin::Treatment);
    take(pool, std::min(n_test, pool.size()), pool.size(), bundle.train_treatment,
         Origin::Treatment);
    take(rest, 0, std::min(n_valid, rest.size()), bundle.validation, Origin::Control);
    take(rest, std::min(n_valid, rest.size()), rest.size(), bundle.train_control,
         Origin::Control);

    if (bundle.train_control.empty())
        throw Error(ErrorKind::DegeneratePool, "no control train events left after split");
    bundle.propensity =
        build_propensity(bundle.train_control, dataset.n_items, config.propensity_cap);
    if (stats) {
        stats->pool_scale = scale;
        stats->pool_size = pool.size();
    }
    return bundle;
}

SplitBundle reg_split(const Dataset& dataset, const SplitConfig& config) {
    config.validate();
    const auto& events = dataset.interactions;
    if (events.empty()) throw Error(ErrorKind::EmptyInput, "reg_split on empty dataset");

    std::vector<std::vector<std::uint32_t>> by_user(dataset.n_users);
    for (std::uint32_t idx = 0; idx < events.size(); ++idx)
        by_user[events[idx].user].push_back(idx);

    Rng rng(config.seed, "split.reg");
    SplitBundle bundle;
    for (auto& own : by_user) {
        if (own.empty()) continue;
        rng.shuffle(own);
        const std::size_t n = own.size();
        const std::size_t n_test = static_cast<std::size_t>(
            std::floor(static_cast<double>(n) * config.test_fraction));
        const std::size_t n_valid = static_cast<std::size_t>(
            std::floor(static_cast<double>(n) * config.validation_fraction));
        for (std::size_t i = 0; i < n; ++i) {
            Interaction ev = events[own[i]];
            if (i < n_test) {
                ev.origin = Origin::Treatment;  // evaluation parity with skew bundles
                bundle.test.push_back(ev);
            } else if (i < n_test + n_valid) {
                ev.origin = Origin::Control;
                bundle.validation.push_back(ev);
            } else {
                ev.origin = Origin::Control;
                bundle.train_control.push_back(ev);
            }
        }
    }
    if (bundle.train_control.empty())
        throw Error(ErrorKind::DegeneratePool, "no control train events left after split");
    bundle.propensity =
        build_propensity(bundle.train_control, dataset.n_items, config.propensity_cap);
    return bundle;
}

SplitBundle make_split(const Dataset& dataset, const SplitConfig& config, SplitStats* stats) {
    if (config.protocol == Protocol::Skew) return skew_split(dataset, config, stats);
    return reg_split(dataset, config);
}

SplitBundle carve_treatment(const SplitBundle& bundle, double fraction, std::uint64_t seed,
                            std::size_t n_items, double propensity_cap) {
    if (fraction <= 0.0 || fraction >= 1.0)
        throw Error(ErrorKind::ConfigError, "carve fraction must lie in (0,1)");
    SplitBundle out = bundle;
    std::vector<std::uint32_t> order(out.train_control.size());
    std::iota(order.begin(), order.end(), 0u);
    Rng rng(seed, "split.carve");
    rng.shuffle(order);

    const std::size_t total = bundle.total_events();
    std::size_t n_move = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(total)));
    n_move = std::min(n_move, out.train_control.size() - 1);

    std::vector<Interaction> kept, moved;
    kept.reserve(out.train_control.size() - n_move);
    moved.reserve(n_move);
    std::vector<bool> is_moved(out.train_control.size(), false);
    for (std::size_t i = 0; i < n_move; ++i) is_moved[order[i]] = true;
    for (std::size_t i = 0; i < out.train_control.size(); ++i) {
        Interaction ev = out.train_control[i];
        if (is_moved[i]) {
            ev.origin = Origin::Treatment;
            moved.push_back(ev);
        } else {
            kept.push_back(ev);
        }
    }
    out.train_control = std::move(kept);
    for (auto& ev : moved) out.train_treatment.push_back(ev);
    out.propensity = build_propensity(out.train_control, n_items, propensity_cap);
    return out;
}

}  // namespace cause
