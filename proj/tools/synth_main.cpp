#include <iostream>

#include <CLI11.hpp>

#include "cause/synth.hpp"

// Writes a deterministic desk-scale ratings CSV with popularity-biased
// exposure, for pipelines that have no real ratings file at hand.
int main(int argc, char** argv) {
    CLI::App app{"generate a synthetic ratings CSV"};
    cause::SynthSpec spec;
    std::string out_path = "ratings_synth.csv";
    app.add_option("-o,--out", out_path, "output CSV path");
    app.add_option("--users", spec.n_users, "number of users");
    app.add_option("--items", spec.n_items, "number of items");
    app.add_option("--events", spec.n_events, "number of rating events");
    app.add_option("--seed", spec.seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    try {
        auto ratings = cause::synth_ratings(spec);
        cause::write_ratings_csv(out_path, ratings);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote " << out_path << "\n";
    return 0;
}
