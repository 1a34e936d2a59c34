#include "cause/objective.hpp"

#include <algorithm>

namespace cause {

namespace {

double sum_sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double cause_loss(const EmbeddingModel& model, std::span<const Interaction> batch_c,
                  std::span<const Interaction> batch_t, const HyperParams& hp) {
    double loss = 0.0;
    if (!batch_t.empty()) {
        double s = 0.0;
        for (const auto& ev : batch_t) {
            Branch ub = hp.split_user_embeddings ? Branch::Treatment : Branch::Control;
            double logit = model.alpha * dot(model.theta_row(Branch::Treatment, ev.item),
                                             model.gamma_row(ub, ev.user), model.d) +
                           model.user_bias[ev.user] + model.item_bias[ev.item] +
                           model.global_bias;
            s += xent(sigmoid(logit), ev.label_value());
        }
        loss += s / static_cast<double>(batch_t.size());
        loss += hp.lambda_t * (sum_sq(model.theta_t) +
                               sum_sq(hp.split_user_embeddings ? model.gamma_t : model.gamma_c));
    }
    if (!batch_c.empty()) {
        double s = 0.0;
        for (const auto& ev : batch_c)
            s += xent(predict(model, ev.user, ev.item, Branch::Control), ev.label_value());
        loss += s / static_cast<double>(batch_c.size());
        loss += hp.lambda_c * (sum_sq(model.theta_c) + sum_sq(model.gamma_c));
    }
    if (hp.lambda_dist != 0.0) {
        double disc = l1_diff(model.theta_t, model.theta_c);
        if (hp.split_user_embeddings) disc += l1_diff(model.gamma_t, model.gamma_c);
        loss += hp.lambda_dist * disc;
    }
    return loss;
}

void cause_grad(const EmbeddingModel& model, std::span<const Interaction> batch_c,
                std::span<const Interaction> batch_t, const HyperParams& hp, ModelGrad& grad) {
    grad.zero();
    const std::size_t d = model.d;

    if (!batch_t.empty()) {
        const double inv = 1.0 / static_cast<double>(batch_t.size());
        std::vector<double>& gamma_store =
            hp.split_user_embeddings ? grad.gamma_t : grad.gamma_c;
        const Branch ub = hp.split_user_embeddings ? Branch::Treatment : Branch::Control;
        for (const auto& ev : batch_t) {
            const double* theta = model.theta_row(Branch::Treatment, ev.item);
            const double* gamma = model.gamma_row(ub, ev.user);
            double logit = model.alpha * dot(theta, gamma, d) + model.user_bias[ev.user] +
                           model.item_bias[ev.item] + model.global_bias;
            double coef = (sigmoid(logit) - ev.label_value()) * inv;
            double* gt = grad.theta_t.data() + ev.item * d;
            double* gg = gamma_store.data() + ev.user * d;
            for (std::size_t k = 0; k < d; ++k) {
                gt[k] += coef * model.alpha * gamma[k];
                gg[k] += coef * model.alpha * theta[k];
            }
            grad.user_bias[ev.user] += coef;
            grad.item_bias[ev.item] += coef;
            grad.global_bias += coef;
        }
        for (std::size_t i = 0; i < model.theta_t.size(); ++i)
            grad.theta_t[i] += 2.0 * hp.lambda_t * model.theta_t[i];
        const std::vector<double>& gsrc =
            hp.split_user_embeddings ? model.gamma_t : model.gamma_c;
        for (std::size_t i = 0; i < gsrc.size(); ++i)
            gamma_store[i] += 2.0 * hp.lambda_t * gsrc[i];
    }

    if (!batch_c.empty()) {
        const double inv = 1.0 / static_cast<double>(batch_c.size());
        for (const auto& ev : batch_c) {
            const double* theta = model.theta_row(Branch::Control, ev.item);
            const double* gamma = model.gamma_row(Branch::Control, ev.user);
            double logit = model.alpha * dot(theta, gamma, d) + model.user_bias[ev.user] +
                           model.item_bias[ev.item] + model.global_bias;
            double coef = (sigmoid(logit) - ev.label_value()) * inv;
            double* gt = grad.theta_c.data() + ev.item * d;
            double* gg = grad.gamma_c.data() + ev.user * d;
            for (std::size_t k = 0; k < d; ++k) {
                gt[k] += coef * model.alpha * gamma[k];
                gg[k] += coef * model.alpha * theta[k];
            }
            grad.user_bias[ev.user] += coef;
            grad.item_bias[ev.item] += coef;
            grad.global_bias += coef;
        }
        for (std::size_t i = 0; i < model.theta_c.size(); ++i)
            grad.theta_c[i] += 2.0 * hp.lambda_c * model.theta_c[i];
        for (std::size_t i = 0; i < model.gamma_c.size(); ++i)
            grad.gamma_c[i] += 2.0 * hp.lambda_c * model.gamma_c[i];
    }

    if (hp.lambda_dist != 0.0) {
        for (std::size_t i = 0; i < model.theta_t.size(); ++i) {
            double s = hp.lambda_dist * sign0(model.theta_t[i] - model.theta_c[i]);
            grad.theta_t[i] += s;
            grad.theta_c[i] -= s;
        }
        if (hp.split_user_embeddings) {
            for (std::size_t i = 0; i < model.gamma_t.size(); ++i) {
                double s = hp.lambda_dist * sign0(model.gamma_t[i] - model.gamma_c[i]);
                grad.gamma_t[i] += s;
                grad.gamma_c[i] -= s;
            }
        }
    }
}

namespace {

double event_ratio(const Interaction& ev, const PropensityTable& table, double ratio_cap) {
    if (ev.origin == Origin::Treatment) return 1.0;
    double pc = table.control_prob[ev.item];
    if (pc <= 0.0)
        throw Error(ErrorKind::ZeroPropensity, "control propensity is zero for a logged item");
    return std::min(table.treatment_prob[ev.item] / pc, ratio_cap);
}

}  // namespace

double banditnet_loss(const EmbeddingModel& model, std::span<const Interaction> events,
                      const PropensityTable& table, double lambda, double ratio_cap) {
    if (events.empty()) throw Error(ErrorKind::EmptySet, "banditnet_loss on empty batch");
    double s = 0.0;
    for (const auto& ev : events) {
        double delta = 1.0 - ev.label_value();
        double ratio = event_ratio(ev, table, ratio_cap);
        s += (delta - lambda) * ratio * predict(model, ev.user, ev.item, Branch::Control);
    }
    return s / static_cast<double>(events.size());
}

double capped_weighted_policy_loss(const EmbeddingModel& model,
                                   std::span<const Interaction> events,
                                   const PropensityTable& table, double ratio_cap) {
    if (events.empty()) throw Error(ErrorKind::EmptySet, "policy loss on empty batch");
    double s = 0.0;
    for (const auto& ev : events) {
        double delta = 1.0 - ev.label_value();
        double ratio = event_ratio(ev, table, ratio_cap);
        s += delta * ratio * predict(model, ev.user, ev.item, Branch::Control);
    }
    return s / static_cast<double>(events.size());
}

}  // namespace cause
