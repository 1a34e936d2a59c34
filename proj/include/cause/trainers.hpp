#pragma once

#include <limits>
#include <string>
#include <vector>

#include "cause/objective.hpp"
#include "cause/splitter.hpp"

namespace cause {

enum class Method : std::uint8_t { SP2V, WSP2V, BPR, BanditNet, CausE };
enum class Adaptation : std::uint8_t { No, Blend, Test, Avg, Prod };

Method method_from_string(const std::string& s);
Adaptation adaptation_from_string(const std::string& s);
const char* method_name(Method m);
const char* adaptation_name(Adaptation a);

struct TrainSpec {
    Method method = Method::SP2V;
    Adaptation adaptation = Adaptation::No;
    Branch predict_branch = Branch::Control;  // read only for CausE prod
    HyperParams hyper;
    double banditnet_lambda = 0.0;
    double ratio_cap = 100.0;

    void validate() const;
    // "cause-prod-c" / "wsp2v-blend" style tag for reports.
    std::string tag() const;
};

struct TrainResult {
    EmbeddingModel model;
    std::vector<double> epoch_losses;  // mean per-step objective value, one per epoch
    double validation_nll = std::numeric_limits<double>::quiet_NaN();
};

// Pointwise factorization on the configured event set (no: control only,
// blend: union, test: treatment only); trains the Control branch.
TrainResult train_sp2v(const SplitBundle& bundle, const TrainSpec& spec);

// SP2V with every control-origin event's loss multiplied by its item's
// propensity weight; treatment-origin events keep weight 1.
TrainResult train_wsp2v(const SplitBundle& bundle, const TrainSpec& spec);

// Pairwise ranking on positive events with uniformly sampled unseen
// negatives, per-triple SGD.
TrainResult train_bpr(const SplitBundle& bundle, const TrainSpec& spec);

// Counterfactual policy-value objective with the capped uniform/control
// exposure ratio.
TrainResult train_banditnet(const SplitBundle& bundle, const TrainSpec& spec);

// The joint two-task objective: control-origin minibatch slices update
// the Control branch, treatment-origin slices the Treatment branch, tied
// by the L1 discrepancy. Avg adaptation pools the whole treatment branch
// into one shared item vector; Prod keeps per-item rows.
TrainResult train_cause(const SplitBundle& bundle, const TrainSpec& spec);

TrainResult train(const SplitBundle& bundle, const TrainSpec& spec);

// Branch dispatch for scoring: CausE prod uses spec.predict_branch, every
// other configuration the Control branch.
double predict_for(const TrainSpec& spec, const EmbeddingModel& model, std::size_t user,
                   std::size_t item);

// Mean cross-entropy of predict_for over a set of events.
double evaluate_nll(const TrainSpec& spec, const EmbeddingModel& model,
                    const std::vector<Interaction>& events);

}  // namespace cause
