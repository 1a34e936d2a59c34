#include "cause/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "cause/rng.hpp"

namespace cause {

Method method_from_string(const std::string& s) {
    if (s == "sp2v") return Method::SP2V;
    if (s == "wsp2v") return Method::WSP2V;
    if (s == "bpr") return Method::BPR;
    if (s == "banditnet") return Method::BanditNet;
    if (s == "cause") return Method::CausE;
    throw Error(ErrorKind::ConfigError, "unknown method: " + s);
}

Adaptation adaptation_from_string(const std::string& s) {
    if (s == "no") return Adaptation::No;
    if (s == "blend") return Adaptation::Blend;
    if (s == "test") return Adaptation::Test;
    if (s == "avg") return Adaptation::Avg;
    if (s == "prod") return Adaptation::Prod;
    throw Error(ErrorKind::ConfigError, "unknown adaptation: " + s);
}

const char* method_name(Method m) {
    switch (m) {
        case Method::SP2V: return "sp2v";
        case Method::WSP2V: return "wsp2v";
        case Method::BPR: return "bpr";
        case Method::BanditNet: return "banditnet";
        case Method::CausE: return "cause";
    }
    return "?";
}

const char* adaptation_name(Adaptation a) {
    switch (a) {
        case Adaptation::No: return "no";
        case Adaptation::Blend: return "blend";
        case Adaptation::Test: return "test";
        case Adaptation::Avg: return "avg";
        case Adaptation::Prod: return "prod";
    }
    return "?";
}

void TrainSpec::validate() const {
    hyper.validate();
    const bool cause_mode = adaptation == Adaptation::Avg || adaptation == Adaptation::Prod;
    if (method == Method::CausE && !cause_mode)
        throw Error(ErrorKind::ConfigError, "cause requires adaptation avg or prod");
    if (method != Method::CausE && cause_mode)
        throw Error(ErrorKind::ConfigError,
                    std::string(adaptation_name(adaptation)) + " applies only to cause");
    if (method == Method::BanditNet && adaptation != Adaptation::Blend)
        throw Error(ErrorKind::ConfigError, "banditnet requires adaptation blend");
    if (method == Method::BPR &&
        !(adaptation == Adaptation::No || adaptation == Adaptation::Blend))
        throw Error(ErrorKind::ConfigError, "bpr supports adaptation no or blend");
    if (method == Method::BanditNet && ratio_cap <= 0)
        throw Error(ErrorKind::ConfigError, "ratio_cap must be positive");
}

std::string TrainSpec::tag() const {
    std::string t = method_name(method);
    t += "-";
    t += adaptation_name(adaptation);
    if (method == Method::CausE && adaptation == Adaptation::Prod)
        t += predict_branch == Branch::Control ? "-c" : "-t";
    return t;
}

namespace {

std::size_t infer_n_users(const SplitBundle& bundle) {
    std::size_t max_user = 0;
    bool any = false;
    for (const auto* set :
         {&bundle.train_control, &bundle.train_treatment, &bundle.validation, &bundle.test}) {
        for (const auto& ev : *set) {
            max_user = std::max(max_user, static_cast<std::size_t>(ev.user));
            any = true;
        }
    }
    if (!any) throw Error(ErrorKind::EmptyTrainingSet, "bundle contains no events");
    return max_user + 1;
}

// Two origin-partitioned event streams consumed by the minibatch engine.
// Each keeps its own shuffle stream, so the control-side draw sequence
// does not depend on whether a treatment side exists.
struct StreamPair {
    std::vector<Interaction> control;
    std::vector<Interaction> treatment;
    std::vector<double> control_weights;    // per-event loss multipliers
    std::vector<double> treatment_weights;
};

enum class LossKind { Xent, BanditNet };

struct EngineOptions {
    // Route treatment-stream events to the Treatment branch (the joint
    // two-task objective); otherwise everything trains the Control branch
    // as a single task.
    bool route_by_origin = false;
    bool avg_pool = false;  // single pooled treatment item vector
    LossKind loss = LossKind::Xent;
    double bn_lambda = 0.0;
    double bn_ratio_cap = 100.0;
    const PropensityTable* table = nullptr;  // BanditNet exposure ratios
};

struct ParamState {
    std::vector<double>* w;
    std::vector<double>* g;
    std::vector<double> v;  // velocity

    ParamState(std::vector<double>& params, std::vector<double>& grads)
        : w(&params), g(&grads), v(params.size(), 0.0) {}
};

TrainResult run_pointwise(std::size_t n_users, std::size_t n_items, const StreamPair& streams,
                          const TrainSpec& spec, const EngineOptions& opt,
                          const std::vector<Interaction>& validation) {
    const HyperParams& hp = spec.hyper;
    hp.validate();
    const std::size_t nc = streams.control.size();
    const std::size_t nt = streams.treatment.size();
    if (nc + nt == 0) throw Error(ErrorKind::EmptyTrainingSet, "no training events");

    TrainResult result;
    result.model = init_model(n_users, n_items, hp.d, hp.seed);
    EmbeddingModel& m = result.model;
    const std::size_t d = m.d;

    ModelGrad grad(m);
    const bool treat_branch_active = opt.route_by_origin;
    const bool split_users = hp.split_user_embeddings;

    // Pooled treatment vector (avg adaptation) with its own stream.
    std::vector<double> tau, tau_grad, tau_vel;
    if (opt.avg_pool) {
        Rng trng(hp.seed, "init.tau");
        const double bound = 1.0 / std::sqrt(static_cast<double>(d));
        tau.resize(d);
        for (auto& x : tau) x = trng.uniform(-bound, bound);
        tau_grad.assign(d, 0.0);
        tau_vel.assign(d, 0.0);
    }

    std::vector<ParamState> states;
    states.emplace_back(m.theta_c, grad.theta_c);
    states.emplace_back(m.gamma_c, grad.gamma_c);
    if (treat_branch_active && !opt.avg_pool) states.emplace_back(m.theta_t, grad.theta_t);
    if (treat_branch_active && split_users) states.emplace_back(m.gamma_t, grad.gamma_t);
    if (hp.train_biases) {
        states.emplace_back(m.user_bias, grad.user_bias);
        states.emplace_back(m.item_bias, grad.item_bias);
    }
    double global_vel = 0.0;

    Rng rng_c(hp.seed, "shuffle.control");
    Rng rng_t(hp.seed, "shuffle.treatment");
    std::vector<std::uint32_t> idx_c(nc), idx_t(nt);
    std::iota(idx_c.begin(), idx_c.end(), 0u);
    std::iota(idx_t.begin(), idx_t.end(), 0u);

    const std::size_t steps_per_epoch = (nc + nt + hp.batch_size - 1) / hp.batch_size;
    const std::size_t total_steps = steps_per_epoch * hp.epochs;
    std::size_t global_step = 0;

    // Accumulates one event's loss and gradient; `scale` folds the event
    // weight and the batch mean together.
    auto accumulate = [&](const Interaction& ev, Branch branch, double weight, double inv,
                          double& loss_sum) {
        const bool treat = branch == Branch::Treatment;
        const double* theta = (treat && opt.avg_pool) ? tau.data() : m.theta_row(branch, ev.item);
        const Branch ub = (treat && split_users) ? Branch::Treatment : Branch::Control;
        const double* gamma = m.gamma_row(ub, ev.user);
        const double logit = m.alpha * dot(theta, gamma, d) + m.user_bias[ev.user] +
                             m.item_bias[ev.item] + m.global_bias;
        const double p = sigmoid(logit);
        double coef;
        if (opt.loss == LossKind::BanditNet) {
            const double delta = 1.0 - ev.label_value();
            double ratio = 1.0;
            if (ev.origin == Origin::Control) {
                double pc = opt.table->control_prob[ev.item];
                if (pc <= 0.0)
                    throw Error(ErrorKind::ZeroPropensity, "zero control propensity in training");
                ratio = std::min(opt.table->treatment_prob[ev.item] / pc, opt.bn_ratio_cap);
            }
            loss_sum += (delta - opt.bn_lambda) * ratio * p * inv;
            coef = (delta - opt.bn_lambda) * ratio * p * (1.0 - p) * inv;
        } else {
            loss_sum += weight * xent(p, ev.label_value()) * inv;
            coef = weight * (p - ev.label_value()) * inv;
        }
        double* gt = (treat && opt.avg_pool) ? tau_grad.data()
                                             : (treat ? grad.theta_t.data() : grad.theta_c.data()) +
                                                   ev.item * d;
        double* gg = ((treat && split_users) ? grad.gamma_t.data() : grad.gamma_c.data()) +
                     ev.user * d;
        for (std::size_t k = 0; k < d; ++k) {
            gt[k] += coef * m.alpha * gamma[k];
            gg[k] += coef * m.alpha * theta[k];
        }
        if (hp.train_biases) {
            grad.user_bias[ev.user] += coef;
            grad.item_bias[ev.item] += coef;
            grad.global_bias += coef;
        }
    };

    auto add_l2 = [](std::vector<double>& g, const std::vector<double>& w, double lambda) {
        double ss = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            g[i] += 2.0 * lambda * w[i];
            ss += w[i] * w[i];
        }
        return lambda * ss;
    };

    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        rng_c.shuffle(idx_c);
        rng_t.shuffle(idx_t);
        double epoch_loss = 0.0;
        for (std::size_t s = 0; s < steps_per_epoch; ++s, ++global_step) {
            const double lr = lr_at(global_step, total_steps, hp.lr0, hp.lr_end);
            const std::size_t c_lo = s * nc / steps_per_epoch;
            const std::size_t c_hi = (s + 1) * nc / steps_per_epoch;
            const std::size_t t_lo = s * nt / steps_per_epoch;
            const std::size_t t_hi = (s + 1) * nt / steps_per_epoch;
            const std::size_t n_slice_c = c_hi - c_lo;
            const std::size_t n_slice_t = t_hi - t_lo;

            grad.zero();
            if (opt.avg_pool) std::fill(tau_grad.begin(), tau_grad.end(), 0.0);
            double step_loss = 0.0;

            if (opt.route_by_origin) {
                const double inv_c = n_slice_c ? 1.0 / static_cast<double>(n_slice_c) : 0.0;
                const double inv_t = n_slice_t ? 1.0 / static_cast<double>(n_slice_t) : 0.0;
                for (std::size_t i = c_lo; i < c_hi; ++i) {
                    const auto& ev = streams.control[idx_c[i]];
                    accumulate(ev, Branch::Control, streams.control_weights[idx_c[i]], inv_c,
                               step_loss);
                }
                for (std::size_t i = t_lo; i < t_hi; ++i) {
                    const auto& ev = streams.treatment[idx_t[i]];
                    accumulate(ev, Branch::Treatment, streams.treatment_weights[idx_t[i]], inv_t,
                               step_loss);
                }
            } else {
                const std::size_t n_all = n_slice_c + n_slice_t;
                const double inv = n_all ? 1.0 / static_cast<double>(n_all) : 0.0;
                for (std::size_t i = c_lo; i < c_hi; ++i) {
                    const auto& ev = streams.control[idx_c[i]];
                    accumulate(ev, Branch::Control, streams.control_weights[idx_c[i]], inv,
                               step_loss);
                }
                for (std::size_t i = t_lo; i < t_hi; ++i) {
                    const auto& ev = streams.treatment[idx_t[i]];
                    accumulate(ev, Branch::Control, streams.treatment_weights[idx_t[i]], inv,
                               step_loss);
                }
            }

            // Task weight penalties, only for tasks fed in this step.
            const bool control_active =
                opt.route_by_origin ? n_slice_c > 0 : (n_slice_c + n_slice_t) > 0;
            const bool treatment_active = opt.route_by_origin && n_slice_t > 0;
            if (control_active) {
                step_loss += add_l2(grad.theta_c, m.theta_c, hp.lambda_c);
                step_loss += add_l2(grad.gamma_c, m.gamma_c, hp.lambda_c);
            }
            if (treatment_active) {
                if (opt.avg_pool) {
                    double ss = 0.0;
                    for (std::size_t k = 0; k < d; ++k) {
                        tau_grad[k] += 2.0 * hp.lambda_t * tau[k];
                        ss += tau[k] * tau[k];
                    }
                    step_loss += hp.lambda_t * ss;
                } else {
                    step_loss += add_l2(grad.theta_t, m.theta_t, hp.lambda_t);
                }
                step_loss += add_l2(split_users ? grad.gamma_t : grad.gamma_c,
                                    split_users ? m.gamma_t : m.gamma_c, hp.lambda_t);
            }

            // Representation discrepancy between the branches.
            if (opt.route_by_origin && hp.lambda_dist != 0.0) {
                double disc = 0.0;
                if (opt.avg_pool) {
                    for (std::size_t j = 0; j < n_items; ++j) {
                        double* tc = grad.theta_c.data() + j * d;
                        const double* wc = m.theta_c.data() + j * d;
                        for (std::size_t k = 0; k < d; ++k) {
                            double diff = tau[k] - wc[k];
                            double sg = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
                            tau_grad[k] += hp.lambda_dist * sg;
                            tc[k] -= hp.lambda_dist * sg;
                            disc += std::fabs(diff);
                        }
                    }
                } else {
                    for (std::size_t i = 0; i < m.theta_t.size(); ++i) {
                        double diff = m.theta_t[i] - m.theta_c[i];
                        double sg = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
                        grad.theta_t[i] += hp.lambda_dist * sg;
                        grad.theta_c[i] -= hp.lambda_dist * sg;
                        disc += std::fabs(diff);
                    }
                }
                if (split_users) {
                    for (std::size_t i = 0; i < m.gamma_t.size(); ++i) {
                        double diff = m.gamma_t[i] - m.gamma_c[i];
                        double sg = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
                        grad.gamma_t[i] += hp.lambda_dist * sg;
                        grad.gamma_c[i] -= hp.lambda_dist * sg;
                        disc += std::fabs(diff);
                    }
                }
                step_loss += hp.lambda_dist * disc;
            }

            for (auto& st : states)
                sgd_momentum_step(*st.w, *st.g, st.v, lr, hp.momentum);
            if (opt.avg_pool)
                sgd_momentum_step(tau, tau_grad, tau_vel, lr, hp.momentum);
            if (hp.train_biases) {
                global_vel = hp.momentum * global_vel + grad.global_bias;
                m.global_bias -= lr * global_vel;
            }
            epoch_loss += step_loss;
        }
        m.check_finite();
        result.epoch_losses.push_back(epoch_loss / static_cast<double>(steps_per_epoch));
    }

    if (treat_branch_active && !split_users) m.gamma_t = m.gamma_c;
    if (opt.avg_pool)
        for (std::size_t j = 0; j < n_items; ++j)
            std::copy(tau.begin(), tau.end(), m.theta_t.begin() + j * d);

    if (!validation.empty()) result.validation_nll = evaluate_nll(spec, m, validation);
    return result;
}

StreamPair pointwise_streams(const SplitBundle& bundle, Adaptation adaptation,
                             const PropensityTable* weight_table) {
    StreamPair s;
    const bool use_control = adaptation == Adaptation::No || adaptation == Adaptation::Blend;
    const bool use_treatment = adaptation == Adaptation::Blend || adaptation == Adaptation::Test;
    if (use_control) s.control = bundle.train_control;
    if (use_treatment) s.treatment = bundle.train_treatment;
    s.control_weights.assign(s.control.size(), 1.0);
    s.treatment_weights.assign(s.treatment.size(), 1.0);
    if (weight_table)
        for (std::size_t i = 0; i < s.control.size(); ++i)
            s.control_weights[i] = weight_table->weight[s.control[i].item];
    return s;
}

}  // namespace

TrainResult train_sp2v(const SplitBundle& bundle, const TrainSpec& spec) {
    spec.validate();
    auto streams = pointwise_streams(bundle, spec.adaptation, nullptr);
    if (streams.control.empty() && streams.treatment.empty())
        throw Error(ErrorKind::EmptyTrainingSet, "sp2v: configured training set is empty");
    EngineOptions opt;
    return run_pointwise(infer_n_users(bundle), bundle.propensity.n_items(), streams, spec, opt,
                         bundle.validation);
}

TrainResult train_wsp2v(const SplitBundle& bundle, const TrainSpec& spec) {
    spec.validate();
    if (spec.adaptation == Adaptation::Test)
        throw Error(ErrorKind::ConfigError, "wsp2v supports adaptation no or blend");
    auto streams = pointwise_streams(bundle, spec.adaptation, &bundle.propensity);
    if (streams.control.empty() && streams.treatment.empty())
        throw Error(ErrorKind::EmptyTrainingSet, "wsp2v: configured training set is empty");
    EngineOptions opt;
    return run_pointwise(infer_n_users(bundle), bundle.propensity.n_items(), streams, spec, opt,
                         bundle.validation);
}

TrainResult train_banditnet(const SplitBundle& bundle, const TrainSpec& spec) {
    spec.validate();
    auto streams = pointwise_streams(bundle, spec.adaptation, nullptr);
    if (streams.control.empty() && streams.treatment.empty())
        throw Error(ErrorKind::EmptyTrainingSet, "banditnet: configured training set is empty");
    EngineOptions opt;
    opt.loss = LossKind::BanditNet;
    opt.bn_lambda = spec.banditnet_lambda;
    opt.bn_ratio_cap = spec.ratio_cap;
    opt.table = &bundle.propensity;
    return run_pointwise(infer_n_users(bundle), bundle.propensity.n_items(), streams, spec, opt,
                         bundle.validation);
}

TrainResult train_cause(const SplitBundle& bundle, const TrainSpec& spec) {
    spec.validate();
    if (bundle.train_treatment.empty())
        throw Error(ErrorKind::EmptyTreatmentSample, "cause needs a treatment training sample");
    if (bundle.train_control.empty())
        throw Error(ErrorKind::EmptyTrainingSet, "cause needs a control training sample");
    StreamPair streams;
    streams.control = bundle.train_control;
    streams.treatment = bundle.train_treatment;
    streams.control_weights.assign(streams.control.size(), 1.0);
    streams.treatment_weights.assign(streams.treatment.size(), 1.0);
    EngineOptions opt;
    opt.route_by_origin = true;
    opt.avg_pool = spec.adaptation == Adaptation::Avg;
    return run_pointwise(infer_n_users(bundle), bundle.propensity.n_items(), streams, spec, opt,
                         bundle.validation);
}

namespace {

TrainResult run_bpr(const SplitBundle& bundle, const TrainSpec& spec) {
    const HyperParams& hp = spec.hyper;
    const std::size_t n_items = bundle.propensity.n_items();
    const std::size_t n_users = infer_n_users(bundle);

    std::vector<Interaction> events = bundle.train_control;
    if (spec.adaptation == Adaptation::Blend)
        events.insert(events.end(), bundle.train_treatment.begin(),
                      bundle.train_treatment.end());
    if (events.empty())
        throw Error(ErrorKind::EmptyTrainingSet, "bpr: configured training set is empty");

    std::vector<std::uint32_t> positives;  // indices of label-1 events
    std::vector<std::unordered_set<std::uint32_t>> pos_items(n_users);
    for (std::uint32_t i = 0; i < events.size(); ++i) {
        if (events[i].label) {
            positives.push_back(i);
            pos_items[events[i].user].insert(events[i].item);
        }
    }
    if (positives.empty()) throw Error(ErrorKind::NoPositives, "bpr found no positive events");

    TrainResult result;
    result.model = init_model(n_users, n_items, hp.d, hp.seed);
    EmbeddingModel& m = result.model;
    const std::size_t d = m.d;

    Rng rng(hp.seed, "negative-sampling");
    const std::size_t triples_per_epoch = positives.size();
    const std::size_t total_steps = triples_per_epoch * hp.epochs;
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        double epoch_loss = 0.0;
        std::size_t used = 0;
        for (std::size_t k = 0; k < triples_per_epoch; ++k, ++step) {
            const double lr = lr_at(step, total_steps, hp.lr0, hp.lr_end);
            const auto& ev = events[positives[rng.below(positives.size())]];
            const auto& owned = pos_items[ev.user];
            if (owned.size() >= n_items) continue;  // nothing left to contrast with
            std::uint32_t neg;
            do {
                neg = static_cast<std::uint32_t>(rng.below(n_items));
            } while (owned.count(neg));

            double* gu = m.gamma_c.data() + ev.user * d;
            double* ti = m.theta_c.data() + ev.item * d;
            double* tj = m.theta_c.data() + neg * d;
            double x = dot(gu, ti, d) - dot(gu, tj, d);
            double slope = sigmoid(-x);  // d(-ln sigma(x))/dx = -sigma(-x)
            double reg_val = 0.0;
            for (std::size_t kk = 0; kk < d; ++kk) {
                double g = gu[kk], i_ = ti[kk], j_ = tj[kk];
                gu[kk] += lr * (slope * (i_ - j_) - 2.0 * hp.lambda_c * g);
                ti[kk] += lr * (slope * g - 2.0 * hp.lambda_c * i_);
                tj[kk] += lr * (-slope * g - 2.0 * hp.lambda_c * j_);
                reg_val += g * g + i_ * i_ + j_ * j_;
            }
            epoch_loss += -std::log(std::clamp(sigmoid(x), 1e-12, 1.0)) +
                          hp.lambda_c * reg_val;
            ++used;
        }
        m.check_finite();
        result.epoch_losses.push_back(used ? epoch_loss / static_cast<double>(used) : 0.0);
    }
    if (!bundle.validation.empty())
        result.validation_nll = evaluate_nll(spec, m, bundle.validation);
    return result;
}

}  // namespace

TrainResult train_bpr(const SplitBundle& bundle, const TrainSpec& spec) {
    spec.validate();
    return run_bpr(bundle, spec);
}

TrainResult train(const SplitBundle& bundle, const TrainSpec& spec) {
    switch (spec.method) {
        case Method::SP2V: return train_sp2v(bundle, spec);
        case Method::WSP2V: return train_wsp2v(bundle, spec);
        case Method::BPR: return train_bpr(bundle, spec);
        case Method::BanditNet: return train_banditnet(bundle, spec);
        case Method::CausE: return train_cause(bundle, spec);
    }
    throw Error(ErrorKind::ConfigError, "unhandled method");
}

double predict_for(const TrainSpec& spec, const EmbeddingModel& model, std::size_t user,
                   std::size_t item) {
    Branch branch = Branch::Control;
    if (spec.method == Method::CausE && spec.adaptation == Adaptation::Prod)
        branch = spec.predict_branch;
    return predict(model, user, item, branch);
}

double evaluate_nll(const TrainSpec& spec, const EmbeddingModel& model,
                    const std::vector<Interaction>& events) {
    if (events.empty()) throw Error(ErrorKind::EmptySet, "evaluate_nll on empty set");
    double s = 0.0;
    for (const auto& ev : events)
        s += xent(predict_for(spec, model, ev.user, ev.item), ev.label_value());
    return s / static_cast<double>(events.size());
}

}  // namespace cause
