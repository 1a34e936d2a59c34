#include "cause/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "cause/objective.hpp"

namespace cause {

std::string MetricReport::csv_header() {
    return "method,adaptation,seed,n_events,avg_cr,mse,nll,auc,mse_lift,nll_lift,"
           "raw_eq21_mse_lift,raw_eq21_nll_lift";
}

std::string MetricReport::csv_row() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%s,%s,%llu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                  method.c_str(), adaptation.c_str(),
                  static_cast<unsigned long long>(seed), n_events, avg_cr, mse, nll, auc,
                  mse_lift, nll_lift, raw_mse_lift, raw_nll_lift);
    return buf;
}

AvgCrMetrics avg_cr_metrics(std::span<const double> labels) {
    if (labels.empty()) throw Error(ErrorKind::EmptySet, "avg_cr_metrics on empty label set");
    double mean = std::accumulate(labels.begin(), labels.end(), 0.0) / labels.size();
    double p = std::clamp(mean, 1e-12, 1.0 - 1e-12);
    double se = 0.0, ce = 0.0;
    for (double y : labels) {
        se += (p - y) * (p - y);
        ce += xent(p, y);
    }
    return {mean, se / labels.size(), ce / labels.size()};
}

double mse(std::span<const double> preds, std::span<const double> labels) {
    if (preds.size() != labels.size())
        throw Error(ErrorKind::LengthMismatch, "mse: prediction/label size mismatch");
    if (preds.empty()) throw Error(ErrorKind::EmptySet, "mse on empty set");
    double s = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        double d = preds[i] - labels[i];
        s += d * d;
    }
    return s / preds.size();
}

double nll(std::span<const double> preds, std::span<const double> labels) {
    if (preds.size() != labels.size())
        throw Error(ErrorKind::LengthMismatch, "nll: prediction/label size mismatch");
    if (preds.empty()) throw Error(ErrorKind::EmptySet, "nll on empty set");
    double s = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) s += xent(preds[i], labels[i]);
    return s / preds.size();
}

double auc(std::span<const double> preds, std::span<const double> labels) {
    if (preds.size() != labels.size())
        throw Error(ErrorKind::LengthMismatch, "auc: prediction/label size mismatch");
    const std::size_t n = preds.size();
    std::size_t n_pos = 0;
    for (double y : labels)
        if (y > 0.5) ++n_pos;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw Error(ErrorKind::SingleClass, "auc needs at least one positive and one negative");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return preds[a] < preds[b]; });

    // Sum of average ranks (1-based) over positives; tied scores share
    // the mean rank of their group.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && preds[order[j + 1]] == preds[order[i]]) ++j;
        double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]] > 0.5) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double lift(double metric_value, double avgcr_value) {
    if (avgcr_value <= 0.0)
        throw Error(ErrorKind::ZeroBaseline, "lift baseline must be positive");
    return (avgcr_value - metric_value) / avgcr_value;
}

double raw_lift(double metric_value, double avgcr_value) {
    if (avgcr_value <= 0.0)
        throw Error(ErrorKind::ZeroBaseline, "lift baseline must be positive");
    return (metric_value - avgcr_value) / avgcr_value;
}

std::string adaptation_tag(const TrainSpec& spec) {
    std::string t = adaptation_name(spec.adaptation);
    if (spec.method == Method::CausE && spec.adaptation == Adaptation::Prod)
        t += spec.predict_branch == Branch::Control ? "-c" : "-t";
    return t;
}

MetricReport evaluate(const TrainSpec& spec, const EmbeddingModel& model,
                      const std::vector<Interaction>& test_events) {
    if (test_events.empty()) throw Error(ErrorKind::EmptySet, "evaluate on empty test set");
    std::vector<double> preds(test_events.size()), labels(test_events.size());
    for (std::size_t i = 0; i < test_events.size(); ++i) {
        preds[i] = predict_for(spec, model, test_events[i].user, test_events[i].item);
        labels[i] = test_events[i].label_value();
    }
    auto base = avg_cr_metrics(labels);
    MetricReport r;
    r.method = method_name(spec.method);
    r.adaptation = adaptation_tag(spec);
    r.seed = spec.hyper.seed;
    r.n_events = test_events.size();
    r.avg_cr = base.avg_cr;
    r.mse = mse(preds, labels);
    r.nll = nll(preds, labels);
    r.auc = auc(preds, labels);
    r.mse_lift = lift(r.mse, base.mse);
    r.nll_lift = lift(r.nll, base.nll);
    r.raw_mse_lift = raw_lift(r.mse, base.mse);
    r.raw_nll_lift = raw_lift(r.nll, base.nll);
    return r;
}

}  // namespace cause
