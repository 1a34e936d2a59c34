#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "cause/model.hpp"
#include "cause/types.hpp"

namespace cause {

// Hyperparameters shared by every SGD trainer. `split_user_embeddings`
// selects the objective variant: false keeps a single user matrix for
// both tasks (the treatment task reads and writes gamma_c), true gives
// the treatment task its own gamma_t plus an L1 discrepancy term on the
// user matrices. `train_biases` gates whether the bias terms are
// trainable at all; when off they stay at zero.
struct HyperParams {
    std::size_t d = 32;
    double lr0 = 0.05;
    double lr_end = 0.001;
    double momentum = 0.9;
    std::size_t epochs = 20;
    std::size_t batch_size = 512;
    double lambda_t = 1e-4;
    double lambda_c = 1e-4;
    double lambda_dist = 1e-2;
    std::uint64_t seed = 42;
    bool train_biases = true;
    bool split_user_embeddings = false;

    void validate() const {
        if (!(lr0 > lr_end && lr_end >= 0.0))
            throw Error(ErrorKind::ConfigError, "need lr0 > lr_end >= 0");
        if (!(momentum >= 0.0 && momentum < 1.0))
            throw Error(ErrorKind::ConfigError, "momentum must be in [0,1)");
        if (epochs == 0 || batch_size == 0 || d == 0)
            throw Error(ErrorKind::ConfigError, "epochs, batch_size and d must be positive");
        if (lambda_t < 0 || lambda_c < 0 || lambda_dist < 0)
            throw Error(ErrorKind::ConfigError, "regularization strengths must be >= 0");
    }
};

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

inline double dot(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
    return s;
}

// sigma(alpha * <theta_j, gamma_i> + b_i + b_j + b) on the requested
// branch, kept strictly inside (0,1) even for extreme logits.
inline double predict(const EmbeddingModel& m, std::size_t user, std::size_t item, Branch branch) {
    double logit = m.alpha * dot(m.theta_row(branch, item), m.gamma_row(branch, user), m.d) +
                   m.user_bias[user] + m.item_bias[item] + m.global_bias;
    return std::clamp(sigmoid(logit), 1e-300, 1.0 - 1e-16);
}

// Cross-entropy with the probability clipped to [1e-12, 1-1e-12].
inline double xent(double p, double y) {
    double q = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return -(y * std::log(q) + (1.0 - y) * std::log1p(-q));
}

// Linearly decaying learning rate.
inline double lr_at(std::size_t step, std::size_t total_steps, double lr0, double lr_end) {
    return lr0 + (lr_end - lr0) * (static_cast<double>(step) / static_cast<double>(total_steps));
}

// Classical momentum: v <- mu*v + g; w <- w - lr*v.
inline void sgd_momentum_step(std::span<double> params, std::span<const double> grads,
                              std::span<double> velocity, double lr, double momentum) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = momentum * velocity[i] + grads[i];
        params[i] -= lr * velocity[i];
    }
}

// Gradient with the same shape as the model (alpha is fixed, not a
// trainable parameter).
struct ModelGrad {
    std::vector<double> gamma_c, gamma_t, theta_c, theta_t, user_bias, item_bias;
    double global_bias = 0.0;

    explicit ModelGrad(const EmbeddingModel& m)
        : gamma_c(m.gamma_c.size(), 0.0),
          gamma_t(m.gamma_t.size(), 0.0),
          theta_c(m.theta_c.size(), 0.0),
          theta_t(m.theta_t.size(), 0.0),
          user_bias(m.n_users, 0.0),
          item_bias(m.n_items, 0.0) {}

    void zero() {
        auto z = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
        z(gamma_c);
        z(gamma_t);
        z(theta_c);
        z(theta_t);
        z(user_bias);
        z(item_bias);
        global_bias = 0.0;
    }
};

// Joint two-task objective over one control batch and one treatment
// batch. Each task term (batch-mean cross-entropy plus its L2 weight
// penalty) is present only when its batch is non-empty; the L1
// discrepancy between the branch representations is always applied.
// With split_user_embeddings=false the treatment task reads gamma_c and
// the user discrepancy is identically zero.
double cause_loss(const EmbeddingModel& model, std::span<const Interaction> batch_c,
                  std::span<const Interaction> batch_t, const HyperParams& hp);

// Exact analytic gradient of cause_loss with respect to every trainable
// parameter. The L1 subgradient at zero is taken to be zero. With
// split_user_embeddings=false the treatment batch contributes to
// grad.gamma_c and grad.gamma_t stays zero.
void cause_grad(const EmbeddingModel& model, std::span<const Interaction> batch_c,
                std::span<const Interaction> batch_t, const HyperParams& hp, ModelGrad& grad);

// Counterfactual policy-value objective: mean over events of
// (delta - lambda) * min(uniform_prob/control_prob, ratio_cap) * s
// where delta = 1 - label and s is the Control-branch prediction acting
// as the policy propensity. Treatment-origin events get ratio 1.
double banditnet_loss(const EmbeddingModel& model, std::span<const Interaction> events,
                      const PropensityTable& table, double lambda, double ratio_cap);

// The lambda-free reduction of the same objective: mean of
// delta * capped_ratio * s.
double capped_weighted_policy_loss(const EmbeddingModel& model,
                                   std::span<const Interaction> events,
                                   const PropensityTable& table, double ratio_cap);

}  // namespace cause
