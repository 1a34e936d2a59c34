// Acceptance suite: one pass/fail line per criterion, exit code equal to
// the number of failed criteria. Heavier end-to-end runs use a synthetic
// ratings file at the classic desk scale (943 users x 1682 items x 100k
// events) generated deterministically up front; point CAUSE_ML100K_CSV at
// a real comma-format ratings file to run on real data instead.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cause/commands.hpp"
#include "cause/evaluation.hpp"
#include "cause/ingestion.hpp"
#include "cause/model.hpp"
#include "cause/policy_lab.hpp"
#include "cause/splitter.hpp"
#include "cause/synth.hpp"
#include "cause/trainers.hpp"
#include "testutil.hpp"

using namespace cause;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int number, bool pass, const std::string& name, const std::string& detail) {
    std::printf("[%2d] %s %s%s%s\n", number, pass ? "PASS" : "FAIL", name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void report_skip(int number, const std::string& name, const std::string& why) {
    std::printf("[%2d] SKIP %s -- %s\n", number, name.c_str(), why.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---- shared desk-scale data ------------------------------------------------

struct DeskData {
    std::string dir;
    std::string csv;
    Dataset dataset;
};

DeskData prepare_desk_data() {
    DeskData d;
    d.dir = testutil::temp_dir("acceptance");
    const char* real = std::getenv("CAUSE_ML100K_CSV");
    if (real && *real) {
        d.csv = real;
    } else {
        d.csv = d.dir + "/ml100k_synth.csv";
        SynthSpec spec;  // defaults: 943 x 1682 x 100000
        write_ratings_csv(d.csv, synth_ratings(spec));
    }
    d.dataset = load_dataset(d.csv, RatingsFormat::Comma);
    return d;
}

HyperParams desk_hyper(std::uint64_t seed) {
    HyperParams hp;
    hp.d = 32;
    hp.lr0 = 0.05;
    hp.lr_end = 0.001;
    hp.momentum = 0.9;
    hp.epochs = 20;
    hp.batch_size = 512;
    hp.lambda_t = 1e-4;
    hp.lambda_c = 1e-4;
    hp.lambda_dist = 1e-2;  // frozen after a validation-NLL grid at desk scale
    hp.seed = seed;
    return hp;
}

TrainSpec desk_spec(Method method, Adaptation adaptation, Branch branch, std::uint64_t seed) {
    TrainSpec spec;
    spec.method = method;
    spec.adaptation = adaptation;
    spec.predict_branch = branch;
    spec.hyper = desk_hyper(seed);
    return spec;
}

// ---- criteria --------------------------------------------------------------

void criterion_1_gradient_oracle() {
    auto t0 = Clock::now();
    double worst = 0.0;
    Rng rng(1001);
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n_users = 5, n_items = 7, d = 8;
        EmbeddingModel m = init_model(n_users, n_items, d, 9000 + inst);
        auto scatter = [&](std::vector<double>& v) {
            for (auto& x : v) x = rng.uniform(-0.5, 0.5);
        };
        scatter(m.gamma_c);
        scatter(m.gamma_t);
        scatter(m.theta_c);
        scatter(m.theta_t);
        scatter(m.user_bias);
        scatter(m.item_bias);
        m.global_bias = rng.uniform(-0.3, 0.3);
        // keep the L1 term away from its kink inside the +-h window
        auto widen = [](std::vector<double>& a, const std::vector<double>& b) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                double diff = a[i] - b[i];
                if (std::fabs(diff) < 1e-3) a[i] = b[i] + (diff >= 0 ? 1e-3 : -1e-3);
            }
        };
        widen(m.theta_t, m.theta_c);
        widen(m.gamma_t, m.gamma_c);

        auto batch_c = testutil::random_events(6, n_users, n_items, Origin::Control, rng);
        auto batch_t = testutil::random_events(4, n_users, n_items, Origin::Treatment, rng);
        HyperParams hp;
        hp.lambda_c = rng.uniform(0.01, 0.1);
        hp.lambda_t = rng.uniform(0.01, 0.1);
        hp.lambda_dist = rng.uniform(0.01, 0.1);
        hp.split_user_embeddings = inst % 2 == 0;

        ModelGrad grad(m);
        cause_grad(m, batch_c, batch_t, hp, grad);
        auto loss = [&](EmbeddingModel& mm) { return cause_loss(mm, batch_c, batch_t, hp); };

        auto check_vec = [&](std::vector<double> EmbeddingModel::* field,
                             const std::vector<double>& analytic) {
            auto& vec = m.*field;
            for (std::size_t i = 0; i < vec.size(); ++i) {
                double fd = testutil::central_diff(
                    m, loss, [&](EmbeddingModel& mm) -> double& { return (mm.*field)[i]; });
                worst = std::max(worst, testutil::rel_err(analytic[i], fd));
            }
        };
        check_vec(&EmbeddingModel::gamma_c, grad.gamma_c);
        check_vec(&EmbeddingModel::gamma_t, grad.gamma_t);
        check_vec(&EmbeddingModel::theta_c, grad.theta_c);
        check_vec(&EmbeddingModel::theta_t, grad.theta_t);
        check_vec(&EmbeddingModel::user_bias, grad.user_bias);
        check_vec(&EmbeddingModel::item_bias, grad.item_bias);
        double fd = testutil::central_diff(
            m, loss, [](EmbeddingModel& mm) -> double& { return mm.global_bias; });
        worst = std::max(worst, testutil::rel_err(grad.global_bias, fd));
    }
    double elapsed = seconds_since(t0);
    report(1, worst < 1e-4 && elapsed < 5.0, "gradient oracle",
           fmt("max relative error %.3g vs finite differences, %.2fs", worst, elapsed));
}

void criterion_2_auc_oracle() {
    Rng rng(2002);
    double worst = 0.0;
    int done = 0;
    while (done < 100) {
        std::size_t n = 2 + rng.below(199);
        std::vector<double> preds(n), labels(n);
        bool any_pos = false, any_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            preds[i] = rng.bernoulli(0.5) ? static_cast<double>(rng.below(10)) / 10.0
                                          : rng.uniform();
            labels[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
            (labels[i] > 0.5 ? any_pos : any_neg) = true;
        }
        if (!any_pos || !any_neg) continue;
        ++done;
        worst = std::max(worst,
                         std::fabs(auc(preds, labels) - testutil::brute_force_auc(preds, labels)));
    }
    report(2, worst < 1e-12, "auc oracle",
           fmt("max |rank-based - pair-counting| = %.3g over 100 inputs", worst));
}

void criterion_3_lemma1() {
    auto t0 = Clock::now();
    const double grid[3] = {0.0, 0.5, 1.0};
    Rng rng(3003);
    std::size_t worlds = 0;
    bool ok = true;
    for (std::size_t nu = 1; nu <= 3 && ok; ++nu) {
        for (std::size_t ni = 2; ni <= 3 && ok; ++ni) {
            const std::size_t cells = nu * ni;
            std::size_t total = 1;
            for (std::size_t c = 0; c < cells; ++c) total *= 3;
            for (std::size_t code = 0; code < total && ok; ++code) {
                SynthWorld w;
                w.n_users = nu;
                w.n_items = ni;
                w.reward.resize(cells);
                std::size_t c = code;
                for (auto& r : w.reward) {
                    r = grid[c % 3];
                    c /= 3;
                }
                w.user_prob.assign(nu, 1.0 / static_cast<double>(nu));
                ++worlds;

                const double best = policy_reward(w, best_policy(w));
                // every deterministic policy: ni^nu assignments
                std::size_t det_total = 1;
                for (std::size_t u = 0; u < nu; ++u) det_total *= ni;
                for (std::size_t det = 0; det < det_total; ++det) {
                    std::vector<std::size_t> pick(nu);
                    std::size_t dd = det;
                    for (std::size_t u = 0; u < nu; ++u) {
                        pick[u] = dd % ni;
                        dd /= ni;
                    }
                    if (policy_reward(w, Policy::deterministic(nu, ni, pick)) > best + 1e-12) {
                        ok = false;
                        break;
                    }
                }
                // random stochastic policies on a sample of worlds
                if (ok && code % 500 == 0) {
                    for (int t = 0; t < 100; ++t) {
                        Policy pi;
                        pi.n_users = nu;
                        pi.n_items = ni;
                        pi.expose.resize(cells);
                        for (std::size_t u = 0; u < nu; ++u) {
                            double tot = 0.0;
                            for (std::size_t i = 0; i < ni; ++i) {
                                pi.expose[u * ni + i] = 0.01 + rng.uniform();
                                tot += pi.expose[u * ni + i];
                            }
                            for (std::size_t i = 0; i < ni; ++i) pi.expose[u * ni + i] /= tot;
                        }
                        if (policy_reward(w, pi) > best + 1e-12) {
                            ok = false;
                            break;
                        }
                    }
                }
            }
        }
    }
    double elapsed = seconds_since(t0);
    report(3, ok && elapsed < 30.0, "argmax policy dominates (exhaustive enumeration)",
           fmt("%zu grid worlds, %.2fs", worlds, elapsed));
}

void criterion_4_ips() {
    Rng rng(4004);
    bool unbiased = true, monotone = true;
    double worst_sigma = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        SynthWorld w;
        w.n_users = 4;
        w.n_items = 4;
        w.reward.resize(16);
        for (auto& r : w.reward) r = rng.uniform();
        w.user_prob.assign(4, 0.25);

        auto random_policy = [&]() {
            Policy pi;
            pi.n_users = 4;
            pi.n_items = 4;
            pi.expose.resize(16);
            for (std::size_t u = 0; u < 4; ++u) {
                double tot = 0.0;
                for (std::size_t i = 0; i < 4; ++i) {
                    pi.expose[u * 4 + i] = 0.05 + rng.uniform();
                    tot += pi.expose[u * 4 + i];
                }
                for (std::size_t i = 0; i < 4; ++i) pi.expose[u * 4 + i] /= tot;
            }
            return pi;
        };
        Policy logging = random_policy();
        Policy target = random_policy();
        LoggedSample sample = sample_logged(w, logging, 100000, rng);
        IpsResult est = ips_estimate_with_se(sample, target);
        double exact = policy_reward(w, target);
        double sigmas = std::fabs(est.estimate - exact) / est.std_error;
        worst_sigma = std::max(worst_sigma, sigmas);
        if (sigmas > 3.0) unbiased = false;

        // variance rises as the logging policy concentrates on popular items
        Policy uniform_target = Policy::uniform(4, 4);
        std::vector<double> pop = {1.0, 2.0, 4.0, 8.0};
        double prev = -1.0;
        for (double beta : {0.0, 1.0, 2.0, 3.0}) {
            Policy skewed = Policy::popularity(4, pop, beta);
            double sum = 0.0, sum_sq = 0.0;
            const int reps = 150;
            for (int rep = 0; rep < reps; ++rep) {
                double e = ips_estimate(sample_logged(w, skewed, 1000, rng), uniform_target);
                sum += e;
                sum_sq += e * e;
            }
            double var = sum_sq / reps - (sum / reps) * (sum / reps);
            if (var <= prev) monotone = false;
            prev = var;
        }
    }
    report(4, unbiased && monotone, "ips unbiasedness and variance growth",
           fmt("worst deviation %.2f sigma over 10 worlds; variance monotone in skew: %s",
               worst_sigma, monotone ? "yes" : "no"));
}

void criterion_5_split_protocol(const DeskData& desk) {
    bool ok = true;
    std::string detail;
    auto counts = item_popularity(desk.dataset);
    auto probs = acceptance_probs(counts, 0.9);
    const double n = static_cast<double>(desk.dataset.interactions.size());
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SplitConfig sc;
        sc.seed = seed;
        SplitStats stats;
        SplitBundle b = skew_split(desk.dataset, sc, &stats);

        double f_test = b.test.size() / n;
        double f_tt = b.train_treatment.size() / n;
        double f_val = b.validation.size() / n;
        double f_tc = b.train_control.size() / n;
        bool fractions_ok = std::fabs(f_test - 0.20) <= 0.02 && std::fabs(f_tt - 0.10) <= 0.02 &&
                            std::fabs(f_val - 0.10) <= 0.02 && std::fabs(f_tc - 0.60) <= 0.02;

        double max_weight =
            *std::max_element(b.propensity.weight.begin(), b.propensity.weight.end());
        double max_pool_prob = 0.0;
        for (std::size_t j = 0; j < probs.size(); ++j)
            max_pool_prob = std::max(max_pool_prob,
                                     std::min(stats.pool_scale * probs[j], 0.9));

        auto cv = [](const std::vector<std::size_t>& c, bool positive_only) {
            double sum = 0.0, m = 0.0;
            for (auto x : c)
                if (!positive_only || x > 0) {
                    sum += static_cast<double>(x);
                    m += 1.0;
                }
            double mean = sum / m, var = 0.0;
            for (auto x : c)
                if (!positive_only || x > 0)
                    var += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
            return std::sqrt(var / m) / mean;
        };
        std::vector<std::size_t> test_counts(desk.dataset.n_items, 0);
        for (const auto& ev : b.test) ++test_counts[ev.item];
        bool cv_ok = cv(test_counts, true) < cv(counts, false);

        bool partition_ok = b.total_events() == desk.dataset.interactions.size();
        if (!(fractions_ok && max_weight <= 10.0 + 1e-12 && max_pool_prob <= 0.9 + 1e-12 &&
              cv_ok && partition_ok)) {
            ok = false;
            detail = fmt("seed %llu: fractions %.3f/%.3f/%.3f/%.3f max_w %.2f cv_ok %d",
                         static_cast<unsigned long long>(seed), f_tc, f_tt, f_val, f_test,
                         max_weight, cv_ok ? 1 : 0);
        }
        if (seed == 1 && ok)
            detail = fmt("seed 1: %.3f/%.3f/%.3f/%.3f, max weight %.2f",
                         f_tc, f_tt, f_val, f_test, max_weight);
    }
    report(5, ok, "skew split protocol at desk scale", detail);
}

void criterion_6_equivalence_ladder() {
    SplitBundle b = testutil::toy_bundle(12, 8, 96, 32, 24, 40, 606);

    // (a) unit weights
    SplitBundle unit = b;
    std::fill(unit.propensity.weight.begin(), unit.propensity.weight.end(), 1.0);
    TrainSpec sp2v_blend;
    sp2v_blend.method = Method::SP2V;
    sp2v_blend.adaptation = Adaptation::Blend;
    sp2v_blend.hyper.d = 6;
    sp2v_blend.hyper.epochs = 4;
    sp2v_blend.hyper.batch_size = 32;
    sp2v_blend.hyper.lr0 = 0.1;
    sp2v_blend.hyper.lr_end = 0.01;
    sp2v_blend.hyper.seed = 61;
    TrainSpec wsp2v_blend = sp2v_blend;
    wsp2v_blend.method = Method::WSP2V;
    TrainResult ra = train_sp2v(unit, sp2v_blend);
    TrainResult rb = train_wsp2v(unit, wsp2v_blend);
    bool a_ok = ra.model.gamma_c == rb.model.gamma_c && ra.model.theta_c == rb.model.theta_c &&
                ra.model.user_bias == rb.model.user_bias &&
                ra.model.item_bias == rb.model.item_bias &&
                ra.model.global_bias == rb.model.global_bias;

    // (b) joint objective with the coupling off, against a control-only
    // run whose batches carry the same control rows
    TrainSpec cause;
    cause.method = Method::CausE;
    cause.adaptation = Adaptation::Prod;
    cause.hyper = sp2v_blend.hyper;
    cause.hyper.lambda_dist = 0.0;
    cause.hyper.train_biases = false;
    cause.hyper.split_user_embeddings = true;
    cause.hyper.batch_size = 32;
    TrainSpec sp2v_no;
    sp2v_no.method = Method::SP2V;
    sp2v_no.adaptation = Adaptation::No;
    sp2v_no.hyper = cause.hyper;
    sp2v_no.hyper.batch_size = 24;
    TrainResult rc = train_cause(b, cause);
    TrainResult rd = train_sp2v(b, sp2v_no);
    bool b_ok = rc.model.gamma_c == rd.model.gamma_c && rc.model.theta_c == rd.model.theta_c;

    // (c) the policy objective at lambda 0 equals its capped-weighted form
    EmbeddingModel m = init_model(12, 8, 6, 66);
    std::vector<Interaction> batch = b.train_control;
    batch.insert(batch.end(), b.train_treatment.begin(), b.train_treatment.end());
    double lhs = banditnet_loss(m, batch, b.propensity, 0.0, 100.0);
    double rhs = capped_weighted_policy_loss(m, batch, b.propensity, 100.0);
    bool c_ok = std::fabs(lhs - rhs) < 1e-12;

    report(6, a_ok && b_ok && c_ok, "equivalence ladder",
           fmt("unit-weight bitwise: %s; decoupled control branch bitwise: %s; "
               "lambda-zero loss delta %.2g",
               a_ok ? "yes" : "no", b_ok ? "yes" : "no", std::fabs(lhs - rhs)));
}

void criterion_7_direction(const DeskData& desk) {
    auto t0 = Clock::now();
    struct Cand {
        const char* name;
        Method method;
        Adaptation adaptation;
    };
    const std::vector<Cand> cands = {
        {"cause-prod-c", Method::CausE, Adaptation::Prod},
        {"wsp2v-blend", Method::WSP2V, Adaptation::Blend},
        {"sp2v-blend", Method::SP2V, Adaptation::Blend},
        {"sp2v-no", Method::SP2V, Adaptation::No},
    };
    std::map<std::string, double> auc_sum, mse_lift_sum, nll_lift_sum;
    const std::vector<std::uint64_t> seeds = {101, 102, 103};
    for (auto seed : seeds) {
        SplitConfig sc;
        sc.seed = seed;
        SplitBundle bundle = skew_split(desk.dataset, sc);
        for (const auto& cand : cands) {
            TrainSpec spec = desk_spec(cand.method, cand.adaptation, Branch::Control, seed);
            TrainResult r = train(bundle, spec);
            MetricReport rep = evaluate(spec, r.model, bundle.test);
            auc_sum[cand.name] += rep.auc;
            mse_lift_sum[cand.name] += rep.mse_lift;
            nll_lift_sum[cand.name] += rep.nll_lift;
        }
    }
    const double k = static_cast<double>(seeds.size());
    auto mean_auc = [&](const char* name) { return auc_sum[name] / k; };

    double a_cause = mean_auc("cause-prod-c");
    double a_w = mean_auc("wsp2v-blend");
    double a_sb = mean_auc("sp2v-blend");
    double a_sn = mean_auc("sp2v-no");
    bool order_ok = (a_cause - a_w >= 0.005) && (a_w - a_sb >= 0.005) && (a_sb - a_sn >= 0.005);
    // the weighted blend run should also dominate the control-only run on
    // the error metrics, not only on auc
    bool dominance_ok = mse_lift_sum["wsp2v-blend"] > mse_lift_sum["sp2v-no"] &&
                        nll_lift_sum["wsp2v-blend"] > nll_lift_sum["sp2v-no"];
    double elapsed = seconds_since(t0);
    report(7, order_ok && dominance_ok && elapsed < 900.0,
           "uplift ordering at desk scale",
           fmt("auc: cause-prod-c %.4f > wsp2v-blend %.4f > sp2v-blend %.4f > sp2v-no %.4f "
               "(3-seed means), %.0fs",
               a_cause, a_w, a_sb, a_sn, elapsed));
}

void criterion_8_reg_parity(const DeskData& desk) {
    std::vector<std::uint64_t> seeds = {301, 302, 303};
    double auc_cause = 0.0, auc_sp2v = 0.0;
    for (auto seed : seeds) {
        SplitConfig sc;
        sc.seed = seed;
        sc.protocol = Protocol::Reg;
        SplitBundle reg = reg_split(desk.dataset, sc);
        // the reg protocol has no uniform sample; carve an on-distribution
        // slice so the joint trainer has a treatment stream
        SplitBundle carved =
            carve_treatment(reg, 0.10, seed, desk.dataset.n_items, sc.propensity_cap);

        TrainSpec cause = desk_spec(Method::CausE, Adaptation::Prod, Branch::Control, seed);
        TrainSpec sp2v = desk_spec(Method::SP2V, Adaptation::Blend, Branch::Control, seed);
        TrainResult rc = train(carved, cause);
        TrainResult rs = train(carved, sp2v);
        auc_cause += evaluate(cause, rc.model, carved.test).auc;
        auc_sp2v += evaluate(sp2v, rs.model, carved.test).auc;
    }
    auc_cause /= 3.0;
    auc_sp2v /= 3.0;
    bool ok = std::fabs(auc_cause - auc_sp2v) < 0.01;
    report(8, ok, "reg-protocol parity",
           fmt("|auc(cause-prod-c) - auc(sp2v-blend)| = %.4f (3-seed means)",
               std::fabs(auc_cause - auc_sp2v)));
}

void criterion_9_injection_trend(const DeskData& desk) {
    std::string dir = desk.dir + "/sweep";
    fs::create_directories(dir);
    RunConfig cfg = RunConfig::from_pairs({
        {"data.path", desk.csv},
        {"data.format", "comma"},
        {"out.dir", dir},
        {"seeds", "201,202,203"},
        {"sweep.fractions", "0.02,0.04,0.06,0.08,0.10"},
        {"sweep.methods", "cause-prod-c"},
        {"hyper.d", "32"},
        {"hyper.epochs", "20"},
        {"hyper.batch_size", "512"},
        {"hyper.lambda_dist", "0.01"},
    });
    cmd_sweep(cfg);

    // mean mse lift per fraction from the emitted csv
    std::ifstream in(dir + "/sweep.csv");
    std::string line;
    std::getline(in, line);  // header
    std::map<double, std::pair<double, int>> lifts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string part;
        while (std::getline(ss, part, ',')) fields.push_back(part);
        if (fields.size() < 16 || fields.back() != "ok") continue;
        double fraction = std::strtod(fields[0].c_str(), nullptr);
        double mse_lift = std::strtod(fields[11].c_str(), nullptr);
        lifts[fraction].first += mse_lift;
        lifts[fraction].second += 1;
    }
    bool have = lifts.count(0.02) && lifts.count(0.10) && lifts[0.02].second == 3 &&
                lifts[0.10].second == 3;
    double low = have ? lifts[0.02].first / 3.0 : 0.0;
    double high = have ? lifts[0.10].first / 3.0 : 0.0;
    bool ok = have && high > low;
    report(9, ok, "injected-fraction trend",
           fmt("mean mse lift at 0.10 = %.4f vs %.4f at 0.02 (3 seeds)", high, low));
}

void criterion_10_determinism(const DeskData& desk) {
    const char* cli = std::getenv("CAUSE_CLI");
    if (!cli || !*cli) {
        report(10, false, "end-to-end determinism", "CAUSE_CLI not set");
        return;
    }
    std::string base = desk.dir + "/determinism";
    fs::create_directories(base);
    std::string conf = base + "/run.conf";
    {
        std::ofstream out(conf);
        out << "data.path = " << desk.csv << "\n"
            << "data.format = comma\n"
            << "seed = 77\n"
            << "train.method = cause\n"
            << "train.adaptation = prod\n"
            << "train.predict_branch = control\n"
            << "hyper.d = 16\n"
            << "hyper.epochs = 3\n"
            << "hyper.batch_size = 512\n"
            << "hyper.lambda_dist = 0.01\n";
    }
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto run = [&](const std::string& args) {
        std::string cmd = std::string(cli) + " " + args + " >> " + base + "/log 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };

    bool ok = true;
    std::map<std::string, std::string> first;
    for (int round = 1; round <= 2 && ok; ++round) {
        std::string work = base + "/round" + std::to_string(round);
        fs::create_directories(work);
        std::string common = "--config " + conf + " --set out.dir=" + work;
        ok = run("prepare " + common) == 0 && run("train " + common) == 0 &&
             run("evaluate " + common + " --model " + work + "/model.txt") == 0;
        if (!ok) break;
        for (const char* f : {"train_c.tsv", "train_t.tsv", "valid.tsv", "test.tsv",
                              "propensity.tsv", "model.txt", "metrics.csv"}) {
            std::string body = slurp(work + "/" + f);
            if (round == 1)
                first[f] = body;
            else if (first[f] != body)
                ok = false;
        }
    }
    report(10, ok, "end-to-end determinism",
           ok ? "prepare/train/evaluate artifacts byte-identical across reruns"
              : "artifacts differ between identical runs");
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    auto t0 = Clock::now();
    DeskData desk = prepare_desk_data();
    std::printf("desk data: %s (%u users, %u items, %zu events)\n", desk.csv.c_str(),
                desk.dataset.n_users, desk.dataset.n_items, desk.dataset.interactions.size());

    criterion_1_gradient_oracle();
    criterion_2_auc_oracle();
    criterion_3_lemma1();
    criterion_4_ips();
    criterion_5_split_protocol(desk);
    criterion_6_equivalence_ladder();
    criterion_7_direction(desk);
    criterion_8_reg_parity(desk);
    criterion_9_injection_trend(desk);
    criterion_10_determinism(desk);
    report_skip(11, "full-scale reproduction (stretch, non-gating)",
                "needs the MovieLens10M dump and hours of runtime; not available here");

    std::printf("RESULT: %d criterion failure(s), %.0fs total\n", g_failures,
                seconds_since(t0));
    return g_failures;
}
