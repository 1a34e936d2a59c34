#include "cause/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "cause/objective.hpp"
#include "cause/rng.hpp"

namespace cause {

namespace {

// Solves for the intercept making mean sigmoid(b + logits) hit `target`.
double calibrate_intercept(const std::vector<double>& logits, double target) {
    auto rate = [&](double b) {
        double s = 0.0;
        for (double x : logits) s += 1.0 / (1.0 + std::exp(-(b + x)));
        return s / static_cast<double>(logits.size());
    };
    double lo = -20.0, hi = 20.0;
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        (rate(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<RawRating> synth_ratings(const SynthSpec& spec) {
    Rng rng(spec.seed, "synth");
    const std::size_t nu = spec.n_users, ni = spec.n_items, k = spec.latent_dim;
    const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));

    std::vector<double> z(nu * k), w(ni * k);
    for (auto& x : z) x = rng.normal();
    for (auto& x : w) x = rng.normal();

    // Item quality and the popularity weights. Popularity can track
    // quality and a fixed "mainstream" latent axis, so biased exposure
    // underdetermines user vectors along the remaining directions.
    std::vector<double> axis(k);
    {
        double norm = 0.0;
        for (auto& x : axis) {
            x = rng.normal();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (auto& x : axis) x /= norm;
    }
    std::vector<double> quality(ni), pop_weight(ni);
    const double resid = std::sqrt(std::max(
        0.0, 1.0 - spec.quality_mix * spec.quality_mix - spec.direction_mix * spec.direction_mix));
    for (std::size_t j = 0; j < ni; ++j) {
        quality[j] = rng.normal();
        double proj = dot(w.data() + j * k, axis.data(), k);
        double mixed = spec.quality_mix * quality[j] + spec.direction_mix * proj +
                       resid * rng.normal();
        pop_weight[j] = std::exp(spec.popularity_sigma * mixed);
    }

    const std::size_t per_user_cap = std::min(spec.max_events_per_user, ni);
    if (spec.min_events_per_user * nu > spec.n_events || per_user_cap * nu < spec.n_events)
        throw Error(ErrorKind::ConfigError,
                    "n_events is not reachable with the per-user activity bounds");

    // Per-user activity, scaled so the total lands on n_events.
    std::vector<std::size_t> activity(nu);
    std::vector<double> raw_act(nu);
    double act_total = 0.0;
    for (std::size_t u = 0; u < nu; ++u) {
        raw_act[u] = std::exp(0.8 * rng.normal());
        act_total += raw_act[u];
    }
    const std::size_t per_user_min = std::min(spec.min_events_per_user, per_user_cap);
    std::size_t assigned = 0;
    for (std::size_t u = 0; u < nu; ++u) {
        double share = raw_act[u] / act_total * static_cast<double>(spec.n_events);
        std::size_t n = static_cast<std::size_t>(std::llround(share));
        activity[u] = std::clamp(n, per_user_min, per_user_cap);
        assigned += activity[u];
    }
    // Distribute the rounding remainder one event at a time.
    std::size_t u_fix = 0;
    while (assigned < spec.n_events) {
        if (activity[u_fix] < per_user_cap) {
            ++activity[u_fix];
            ++assigned;
        }
        u_fix = (u_fix + 1) % nu;
    }
    while (assigned > spec.n_events) {
        if (activity[u_fix] > per_user_min) {
            --activity[u_fix];
            --assigned;
        }
        u_fix = (u_fix + 1) % nu;
    }

    // Exposure: weighted sampling without replacement per user via
    // exponential races; the logging policy favours popular items with a
    // personalized tilt.
    struct Drawn {
        std::size_t user, item;
        double affinity;
    };
    std::vector<Drawn> events;
    events.reserve(spec.n_events);
    std::vector<std::pair<double, std::size_t>> race(ni);
    for (std::size_t u = 0; u < nu; ++u) {
        const double* zu = z.data() + u * k;
        for (std::size_t j = 0; j < ni; ++j) {
            double aff = dot(zu, w.data() + j * k, k) * inv_sqrt_k;
            double weight = pop_weight[j] * std::exp(spec.expose_affinity * aff);
            double key = -std::log(1.0 - rng.uniform()) / weight;
            race[j] = {key, j};
        }
        std::partial_sort(race.begin(), race.begin() + static_cast<long>(activity[u]),
                          race.end());
        for (std::size_t t = 0; t < activity[u]; ++t) {
            std::size_t j = race[t].second;
            double aff = dot(z.data() + u * k, w.data() + j * k, k) * inv_sqrt_k;
            events.push_back({u, j, aff});
        }
    }

    // Cover items the exposure draw missed by re-pointing events whose
    // item keeps at least one other occurrence.
    {
        std::vector<std::size_t> item_count(ni, 0);
        std::vector<std::vector<bool>> seen(nu, std::vector<bool>(ni, false));
        for (const auto& ev : events) {
            ++item_count[ev.item];
            seen[ev.user][ev.item] = true;
        }
        std::size_t cursor = 0;
        for (std::size_t j = 0; j < ni; ++j) {
            if (item_count[j] > 0) continue;
            while (cursor < events.size() &&
                   (item_count[events[cursor].item] < 2 || seen[events[cursor].user][j]))
                ++cursor;
            if (cursor == events.size()) break;
            auto& ev = events[cursor];
            --item_count[ev.item];
            seen[ev.user][ev.item] = false;
            ev.item = j;
            ev.affinity = dot(z.data() + ev.user * k, w.data() + j * k, k) * inv_sqrt_k;
            ++item_count[j];
            seen[ev.user][j] = true;
        }
    }

    std::vector<double> logits(events.size());
    for (std::size_t e = 0; e < events.size(); ++e)
        logits[e] =
            spec.label_affinity * events[e].affinity + spec.label_quality * quality[events[e].item];
    const double intercept = calibrate_intercept(logits, spec.positive_rate);

    std::vector<RawRating> out;
    out.reserve(events.size());
    // Non-five ratings use a fixed star distribution; downstream only
    // cares that they are not 5.
    const double star_cdf[3] = {0.08, 0.22, 0.52};  // then 4 stars
    for (std::size_t e = 0; e < events.size(); ++e) {
        bool five = rng.bernoulli(1.0 / (1.0 + std::exp(-(intercept + logits[e]))));
        double stars;
        if (five) {
            stars = 5.0;
        } else {
            double v = rng.uniform();
            stars = v < star_cdf[0] ? 1.0 : v < star_cdf[1] ? 2.0 : v < star_cdf[2] ? 3.0 : 4.0;
        }
        RawRating r;
        r.user_token = std::to_string(events[e].user + 1);
        r.item_token = std::to_string(events[e].item + 1);
        r.rating = stars;
        r.timestamp = 874000000 + static_cast<std::int64_t>(e);
        out.push_back(std::move(r));
    }
    return out;
}

void write_ratings_csv(const std::string& path, const std::vector<RawRating>& ratings) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error(ErrorKind::IoError, "cannot write ratings file: " + path);
    std::fprintf(f, "userId,movieId,rating,timestamp\n");
    for (const auto& r : ratings)
        std::fprintf(f, "%s,%s,%g,%lld\n", r.user_token.c_str(), r.item_token.c_str(), r.rating,
                     static_cast<long long>(r.timestamp));
    std::fclose(f);
}

}  // namespace cause
