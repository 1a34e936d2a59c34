#include "cause/policy_lab.hpp"

#include <cmath>

namespace cause {

void SynthWorld::check() const {
    if (n_users < 1 || n_items < 2)
        throw Error(ErrorKind::ShapeMismatch, "world needs at least 1 user and 2 items");
    if (reward.size() != n_users * n_items || user_prob.size() != n_users)
        throw Error(ErrorKind::ShapeMismatch, "world matrix sizes disagree with counts");
    double s = 0.0;
    for (double p : user_prob) {
        if (p < 0.0) throw Error(ErrorKind::ShapeMismatch, "negative user probability");
        s += p;
    }
    if (std::fabs(s - 1.0) > 1e-9)
        throw Error(ErrorKind::ShapeMismatch, "user distribution does not sum to 1");
    for (double r : reward)
        if (r < 0.0 || r > 1.0)
            throw Error(ErrorKind::ShapeMismatch, "reward mean outside [0,1]");
}

SynthWorld SynthWorld::with_null_item() const {
    SynthWorld out;
    out.n_users = n_users;
    out.n_items = n_items + 1;
    out.user_prob = user_prob;
    out.reward.resize(n_users * out.n_items);
    for (std::size_t u = 0; u < n_users; ++u) {
        for (std::size_t i = 0; i < n_items; ++i) out.reward[u * out.n_items + i] = r(u, i);
        out.reward[u * out.n_items + n_items] = 0.0;
    }
    return out;
}

void Policy::check() const {
    if (expose.size() != n_users * n_items)
        throw Error(ErrorKind::ShapeMismatch, "policy matrix size disagrees with counts");
    for (std::size_t u = 0; u < n_users; ++u) {
        double s = 0.0;
        for (std::size_t i = 0; i < n_items; ++i) {
            double v = p(u, i);
            if (v < 0.0) throw Error(ErrorKind::ShapeMismatch, "negative exposure probability");
            s += v;
        }
        if (std::fabs(s - 1.0) > 1e-9)
            throw Error(ErrorKind::ShapeMismatch, "policy row does not sum to 1");
    }
}

Policy Policy::uniform(std::size_t n_users, std::size_t n_items) {
    Policy pi;
    pi.n_users = n_users;
    pi.n_items = n_items;
    pi.expose.assign(n_users * n_items, 1.0 / static_cast<double>(n_items));
    return pi;
}

Policy Policy::deterministic(std::size_t n_users, std::size_t n_items,
                             const std::vector<std::size_t>& item_per_user) {
    Policy pi;
    pi.n_users = n_users;
    pi.n_items = n_items;
    pi.expose.assign(n_users * n_items, 0.0);
    for (std::size_t u = 0; u < n_users; ++u) pi.expose[u * n_items + item_per_user[u]] = 1.0;
    return pi;
}

Policy Policy::popularity(std::size_t n_users, const std::vector<double>& weights, double beta) {
    Policy pi;
    pi.n_users = n_users;
    pi.n_items = weights.size();
    std::vector<double> row(pi.n_items);
    double s = 0.0;
    for (std::size_t i = 0; i < pi.n_items; ++i) {
        row[i] = std::pow(weights[i], beta);
        s += row[i];
    }
    for (auto& v : row) v /= s;
    pi.expose.resize(n_users * pi.n_items);
    for (std::size_t u = 0; u < n_users; ++u)
        std::copy(row.begin(), row.end(), pi.expose.begin() + u * pi.n_items);
    return pi;
}

namespace {

void check_shapes(const SynthWorld& world, const Policy& policy) {
    if (world.n_users != policy.n_users || world.n_items != policy.n_items)
        throw Error(ErrorKind::ShapeMismatch, "world and policy shapes disagree");
}

// Lowest-index argmax with a small tie tolerance, used on both the true
// rewards and the propensity-corrected estimates so ties resolve the
// same way on either side.
std::size_t argmax_tied(const std::vector<double>& row) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
        if (row[i] > row[best] + 1e-12) best = i;
    return best;
}

}  // namespace

double policy_reward(const SynthWorld& world, const Policy& policy) {
    check_shapes(world, policy);
    double total = 0.0;
    for (std::size_t u = 0; u < world.n_users; ++u) {
        double per_user = 0.0;
        for (std::size_t i = 0; i < world.n_items; ++i)
            per_user += world.r(u, i) * policy.p(u, i);
        total += per_user * world.user_prob[u];
    }
    return total;
}

double ite(const SynthWorld& world, const Policy& policy, const Policy& control) {
    return policy_reward(world, policy) - policy_reward(world, control);
}

Policy best_policy(const SynthWorld& world) {
    world.check();
    std::vector<std::size_t> pick(world.n_users, 0);
    for (std::size_t u = 0; u < world.n_users; ++u) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < world.n_items; ++i)
            if (world.r(u, i) > world.r(u, best)) best = i;
        pick[u] = best;
    }
    return Policy::deterministic(world.n_users, world.n_items, pick);
}

LoggedSample sample_logged(const SynthWorld& world, const Policy& logging, std::size_t n,
                           Rng& rng) {
    check_shapes(world, logging);
    LoggedSample out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        double uu = rng.uniform();
        std::size_t user = world.n_users - 1;
        double acc = 0.0;
        for (std::size_t u = 0; u < world.n_users; ++u) {
            acc += world.user_prob[u];
            if (uu < acc) {
                user = u;
                break;
            }
        }
        double ui = rng.uniform();
        std::size_t item = world.n_items - 1;
        acc = 0.0;
        for (std::size_t i = 0; i < world.n_items; ++i) {
            acc += logging.p(user, i);
            if (ui < acc) {
                item = i;
                break;
            }
        }
        LoggedEvent ev;
        ev.user = user;
        ev.item = item;
        ev.outcome = rng.bernoulli(world.r(user, item)) ? 1.0 : 0.0;
        ev.logging_prob = logging.p(user, item);
        out.push_back(ev);
    }
    return out;
}

IpsResult ips_estimate_with_se(const LoggedSample& sample, const Policy& target) {
    if (sample.empty()) throw Error(ErrorKind::EmptySet, "ips_estimate on empty sample");
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& ev : sample) {
        if (ev.logging_prob <= 0.0)
            throw Error(ErrorKind::ZeroPropensity, "logged event with zero logging probability");
        double v = ev.outcome * target.p(ev.user, ev.item) / ev.logging_prob;
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(sample.size());
    IpsResult r;
    r.estimate = sum / n;
    double var = std::max(0.0, sum_sq / n - r.estimate * r.estimate);
    r.std_error = std::sqrt(var / n);
    return r;
}

double ips_estimate(const LoggedSample& sample, const Policy& target) {
    return ips_estimate_with_se(sample, target).estimate;
}

bool argmax_rand_equivalence(const SynthWorld& world, const Policy& control) {
    check_shapes(world, control);
    const Policy uniform = Policy::uniform(world.n_users, world.n_items);
    for (std::size_t u = 0; u < world.n_users; ++u) {
        std::vector<double> truth(world.n_items), via_rand(world.n_items),
            via_control(world.n_items);
        for (std::size_t i = 0; i < world.n_items; ++i) {
            if (control.p(u, i) <= 0.0)
                throw Error(ErrorKind::ZeroPropensity, "control policy lacks full support");
            truth[i] = world.r(u, i);
            // expected observed outcome under a policy, corrected by its
            // exposure probability
            via_rand[i] = (world.r(u, i) * uniform.p(u, i)) / uniform.p(u, i);
            via_control[i] = (world.r(u, i) * control.p(u, i)) / control.p(u, i);
        }
        std::size_t want = argmax_tied(truth);
        if (argmax_tied(via_rand) != want || argmax_tied(via_control) != want) return false;
    }
    return true;
}

}  // namespace cause
