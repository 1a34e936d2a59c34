#pragma once

#include <string>
#include <vector>

#include "cause/ingestion.hpp"

namespace cause {

// Deterministic ratings generator with the structure that makes the
// uniform-exposure protocol interesting: exposure is popularity-biased,
// popularity correlates with item quality, and five-star outcomes depend
// on a low-rank user-item affinity plus that quality. Defaults produce a
// file at the classic 943 x 1682 x 100k desk scale.
struct SynthSpec {
    std::size_t n_users = 943;
    std::size_t n_items = 1682;
    std::size_t n_events = 100000;
    std::uint64_t seed = 7001;
    std::size_t latent_dim = 6;
    double popularity_sigma = 1.0;   // spread of item popularity weights
    double quality_mix = 0.0;        // how much popularity tracks quality
    double direction_mix = 0.9;      // how much popularity tracks one latent axis
    double expose_affinity = 0.6;    // personalization of the logging policy
    double label_affinity = 2.2;     // affinity weight in the five-star logit
    double label_quality = 0.7;      // quality weight in the five-star logit
    double positive_rate = 0.21;     // calibrated overall five-star share
    std::size_t min_events_per_user = 20;
    std::size_t max_events_per_user = 600;
};

std::vector<RawRating> synth_ratings(const SynthSpec& spec);

// Comma-format file with a header line, loadable with RatingsFormat::Comma.
void write_ratings_csv(const std::string& path, const std::vector<RawRating>& ratings);

}  // namespace cause
