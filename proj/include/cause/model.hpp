#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cause/error.hpp"
#include "cause/rng.hpp"

namespace cause {

enum class Branch : std::uint8_t { Control, Treatment };

inline const char* branch_name(Branch b) { return b == Branch::Control ? "control" : "treatment"; }

// Factorization model with one embedding pair per policy branch. The
// treatment item vector difference theta_t[j] - theta_c[j] is the
// per-item representation shift and is never stored separately. Biases
// and the scale factor are shared between branches.
struct EmbeddingModel {
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::size_t d = 0;

    // row-major (n_users x d) / (n_items x d)
    std::vector<double> gamma_c, gamma_t;
    std::vector<double> theta_c, theta_t;
    std::vector<double> user_bias, item_bias;
    double global_bias = 0.0;
    double alpha = 1.0;

    double* user_row(std::vector<double>& m, std::size_t u) { return m.data() + u * d; }
    const double* gamma_row(Branch b, std::size_t u) const {
        return (b == Branch::Control ? gamma_c : gamma_t).data() + u * d;
    }
    const double* theta_row(Branch b, std::size_t i) const {
        return (b == Branch::Control ? theta_c : theta_t).data() + i * d;
    }

    bool finite() const;
    void check_finite() const;
};

// Embeddings ~ uniform(-1/sqrt(d), 1/sqrt(d)) drawn from per-matrix
// sub-streams of `seed`; biases zero, alpha one. Drawing each matrix
// from its own stream keeps the control matrices independent of whether
// the treatment ones are consumed.
EmbeddingModel init_model(std::size_t n_users, std::size_t n_items, std::size_t d,
                          std::uint64_t seed);

// Versioned text serialization (17 significant digits, round-trip exact
// for doubles). See save_model for the block layout.
void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path);

inline constexpr const char* kModelFormatVersion = "CAUSE-MODEL 1";

}  // namespace cause
