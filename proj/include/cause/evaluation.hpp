#pragma once

#include <span>
#include <string>
#include <vector>

#include "cause/types.hpp"

namespace cause {

// Summary of one model's performance on a test set, with lifts against
// the constant average-rate predictor. Both lift conventions are kept:
// `*_lift` is (baseline - metric) / baseline, positive means better than
// the trivial predictor; `raw_*_lift` is (metric - baseline) / baseline.
struct MetricReport {
    std::string method;
    std::string adaptation;
    std::uint64_t seed = 0;
    std::size_t n_events = 0;
    double avg_cr = 0.0;
    double mse = 0.0;
    double nll = 0.0;
    double auc = 0.0;
    double mse_lift = 0.0;
    double nll_lift = 0.0;
    double raw_mse_lift = 0.0;
    double raw_nll_lift = 0.0;

    static std::string csv_header();
    std::string csv_row() const;
};

// MSE and NLL of the constant predictor p = mean(labels), p clipped to
// [1e-12, 1-1e-12].
struct AvgCrMetrics {
    double avg_cr;
    double mse;
    double nll;
};
AvgCrMetrics avg_cr_metrics(std::span<const double> labels);

double mse(std::span<const double> preds, std::span<const double> labels);
double nll(std::span<const double> preds, std::span<const double> labels);

// Probability that a random positive outscores a random negative, ties
// counted half. Rank statistic with average ranks, so tied groups are
// exact. Throws SingleClass if labels are all equal.
double auc(std::span<const double> preds, std::span<const double> labels);

// Relative improvement over the baseline value: (baseline - metric) / baseline.
double lift(double metric_value, double avgcr_value);
// The raw convention: (metric - baseline) / baseline.
double raw_lift(double metric_value, double avgcr_value);

}  // namespace cause

#include "cause/trainers.hpp"

namespace cause {

// Scores every test event with the branch the spec dictates and collects
// all metrics and lifts.
MetricReport evaluate(const TrainSpec& spec, const EmbeddingModel& model,
                      const std::vector<Interaction>& test_events);

// "no" / "blend" / "prod-c" style adaptation label used in reports.
std::string adaptation_tag(const TrainSpec& spec);

}  // namespace cause
