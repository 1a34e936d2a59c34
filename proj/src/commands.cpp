#include "cause/commands.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <json.hpp>

#include "cause/evaluation.hpp"
#include "cause/ingestion.hpp"
#include "cause/io.hpp"
#include "cause/model.hpp"
#include "cause/policy_lab.hpp"
#include "cause/splitter.hpp"
#include "cause/trainers.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace cause {

namespace {

json config_echo(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg.entries()) j[k] = v;
    return j;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

SplitConfig split_config_from(const RunConfig& cfg) {
    SplitConfig sc;
    sc.seed = cfg.get_u64("seed", 42);
    sc.protocol = cfg.get_string("split.protocol", "skew") == "reg" ? Protocol::Reg
                                                                    : Protocol::Skew;
    std::string proto = cfg.get_string("split.protocol", "skew");
    if (proto != "reg" && proto != "skew")
        throw Error(ErrorKind::ConfigError, "split.protocol must be reg or skew");
    sc.skew_test_pool = cfg.get_double("split.skew_test_pool", 0.30);
    sc.test_fraction = cfg.get_double("split.test_fraction", 0.20);
    sc.treatment_train_fraction = cfg.get_double("split.treatment_train_fraction", 0.10);
    sc.validation_fraction = cfg.get_double("split.validation_fraction", 0.10);
    sc.move_cap = cfg.get_double("split.move_cap", 0.9);
    sc.propensity_cap = cfg.get_double("split.propensity_cap", 10.0);
    sc.validate();
    return sc;
}

HyperParams hyper_from(const RunConfig& cfg) {
    HyperParams hp;
    hp.d = static_cast<std::size_t>(cfg.get_int("hyper.d", 32));
    hp.lr0 = cfg.get_double("hyper.lr0", 0.05);
    hp.lr_end = cfg.get_double("hyper.lr_end", 0.001);
    hp.momentum = cfg.get_double("hyper.momentum", 0.9);
    hp.epochs = static_cast<std::size_t>(cfg.get_int("hyper.epochs", 20));
    hp.batch_size = static_cast<std::size_t>(cfg.get_int("hyper.batch_size", 512));
    hp.lambda_t = cfg.get_double("hyper.lambda_t", 1e-4);
    hp.lambda_c = cfg.get_double("hyper.lambda_c", 1e-4);
    hp.lambda_dist = cfg.get_double("hyper.lambda_dist", 1e-2);
    hp.seed = cfg.get_u64("seed", 42);
    hp.train_biases = cfg.get_bool("hyper.train_biases", true);
    hp.split_user_embeddings = cfg.get_bool("hyper.split_user_embeddings", false);
    hp.validate();
    return hp;
}

TrainSpec spec_from(const RunConfig& cfg) {
    TrainSpec spec;
    spec.method = method_from_string(cfg.get_string("train.method"));
    spec.adaptation = adaptation_from_string(cfg.get_string("train.adaptation"));
    std::string branch = cfg.get_string("train.predict_branch", "control");
    if (branch != "control" && branch != "treatment")
        throw Error(ErrorKind::ConfigError, "train.predict_branch must be control or treatment");
    spec.predict_branch = branch == "control" ? Branch::Control : Branch::Treatment;
    spec.hyper = hyper_from(cfg);
    spec.banditnet_lambda = cfg.get_double("train.banditnet_lambda", 0.0);
    spec.ratio_cap = cfg.get_double("train.ratio_cap", 100.0);
    spec.validate();
    return spec;
}

// "cause-prod-c" / "wsp2v-blend" style tags, the sweep's method grammar.
TrainSpec spec_from_tag(const std::string& tag, const HyperParams& hp) {
    TrainSpec spec;
    spec.hyper = hp;
    std::string rest = tag;
    auto take = [&]() {
        auto dash = rest.find('-');
        std::string head = rest.substr(0, dash);
        rest = dash == std::string::npos ? "" : rest.substr(dash + 1);
        return head;
    };
    spec.method = method_from_string(take());
    if (rest.empty()) throw Error(ErrorKind::ConfigError, "method tag lacks adaptation: " + tag);
    auto dash = rest.find('-');
    spec.adaptation = adaptation_from_string(rest.substr(0, dash));
    if (dash != std::string::npos) {
        std::string b = rest.substr(dash + 1);
        if (b == "c")
            spec.predict_branch = Branch::Control;
        else if (b == "t")
            spec.predict_branch = Branch::Treatment;
        else
            throw Error(ErrorKind::ConfigError, "bad branch suffix in method tag: " + tag);
    }
    spec.validate();
    return spec;
}

struct SplitDir {
    std::string train_c, train_t, valid, test, propensity, manifest;

    explicit SplitDir(const std::string& dir)
        : train_c(dir + "/train_c.tsv"),
          train_t(dir + "/train_t.tsv"),
          valid(dir + "/valid.tsv"),
          test(dir + "/test.tsv"),
          propensity(dir + "/propensity.tsv"),
          manifest(dir + "/manifest.json") {}
};

SplitBundle read_bundle(const SplitDir& paths) {
    SplitBundle b;
    b.train_control = read_events_tsv(paths.train_c);
    b.train_treatment = read_events_tsv(paths.train_t);
    b.validation = read_events_tsv(paths.valid);
    b.test = read_events_tsv(paths.test);
    b.propensity = read_propensity_tsv(paths.propensity);
    return b;
}

json epoch_losses_json(const std::vector<double>& losses) {
    json arr = json::array();
    for (double v : losses) arr.push_back(v);
    return arr;
}

}  // namespace

void cmd_prepare(const RunConfig& cfg) {
    cfg.validate_keys();
    cfg.require({"data.path"});
    const std::string out_dir = cfg.get_string("out.dir", ".");
    const auto format = ratings_format_from_string(cfg.get_string("data.format", "comma"));
    const SplitConfig sc = split_config_from(cfg);

    Dataset ds = load_dataset(cfg.get_string("data.path"), format);
    ds.check();
    SplitStats stats;
    SplitBundle bundle = make_split(ds, sc, &stats);

    fs::create_directories(out_dir);
    SplitDir paths(out_dir);
    write_events_tsv(paths.train_c, bundle.train_control);
    write_events_tsv(paths.train_t, bundle.train_treatment);
    write_events_tsv(paths.valid, bundle.validation);
    write_events_tsv(paths.test, bundle.test);
    write_propensity_tsv(paths.propensity, bundle.propensity);

    json manifest;
    manifest["kind"] = "prepare";
    manifest["config"] = config_echo(cfg);
    manifest["seed"] = sc.seed;
    manifest["rng"] = kRngAlgorithm;
    manifest["protocol"] = protocol_name(sc.protocol);
    manifest["fractions"] = {{"skew_test_pool", sc.skew_test_pool},
                             {"test", sc.test_fraction},
                             {"treatment_train", sc.treatment_train_fraction},
                             {"validation", sc.validation_fraction}};
    manifest["caps"] = {{"move_cap", sc.move_cap}, {"propensity_cap", sc.propensity_cap}};
    manifest["n_users"] = ds.n_users;
    manifest["n_items"] = ds.n_items;
    manifest["n_events"] = ds.interactions.size();
    manifest["achieved"] = {{"train_control", bundle.train_control.size()},
                            {"train_treatment", bundle.train_treatment.size()},
                            {"validation", bundle.validation.size()},
                            {"test", bundle.test.size()}};
    if (sc.protocol == Protocol::Skew) {
        manifest["pool_scale"] = stats.pool_scale;
        manifest["pool_size"] = stats.pool_size;
    }
    manifest["formats"] = {{"split", kSplitFormatVersion},
                           {"propensity", kPropensityFormatVersion}};
    write_json(paths.manifest, manifest);
}

void cmd_train(const RunConfig& cfg) {
    cfg.validate_keys();
    cfg.require({"train.method", "train.adaptation"});
    const std::string out_dir = cfg.get_string("out.dir", ".");
    SplitDir paths(out_dir);
    SplitBundle bundle = read_bundle(paths);

    TrainSpec spec = spec_from(cfg);
    json manifest;
    manifest["kind"] = "train";
    manifest["config"] = config_echo(cfg);
    manifest["rng"] = kRngAlgorithm;
    manifest["optimizer"] =
        spec.method == Method::BPR ? "per-triple-sgd" : "sgd-momentum-linear-decay";
    manifest["alpha"] = "fixed at 1";

    // Hyperparameters the config leaves open are picked on validation NLL.
    TrainResult result;
    if (spec.method == Method::BanditNet && !cfg.has("train.banditnet_lambda")) {
        json grid = json::array();
        double best = std::numeric_limits<double>::infinity();
        TrainResult best_result;
        double best_lambda = 0.0;
        for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            TrainSpec s = spec;
            s.banditnet_lambda = lam;
            TrainResult r = train(bundle, s);
            grid.push_back({{"lambda", lam}, {"validation_nll", r.validation_nll}});
            if (r.validation_nll < best) {
                best = r.validation_nll;
                best_result = std::move(r);
                best_lambda = lam;
            }
        }
        manifest["banditnet_lambda_grid"] = grid;
        manifest["banditnet_lambda"] = best_lambda;
        spec.banditnet_lambda = best_lambda;
        result = std::move(best_result);
    } else if (spec.method == Method::CausE && !cfg.has("hyper.lambda_dist")) {
        json grid = json::array();
        double best = std::numeric_limits<double>::infinity();
        TrainResult best_result;
        double best_lambda = 0.0;
        for (double lam : {1e-4, 1e-3, 1e-2, 1e-1}) {
            TrainSpec s = spec;
            s.hyper.lambda_dist = lam;
            TrainResult r = train(bundle, s);
            grid.push_back({{"lambda_dist", lam}, {"validation_nll", r.validation_nll}});
            if (r.validation_nll < best) {
                best = r.validation_nll;
                best_result = std::move(r);
                best_lambda = lam;
            }
        }
        manifest["lambda_dist_grid"] = grid;
        manifest["lambda_dist"] = best_lambda;
        spec.hyper.lambda_dist = best_lambda;
        result = std::move(best_result);
    } else {
        result = train(bundle, spec);
    }

    const std::string model_out = cfg.get_string("train.model_out", out_dir + "/model.txt");
    save_model(result.model, model_out);

    manifest["method"] = method_name(spec.method);
    manifest["adaptation"] = adaptation_tag(spec);
    manifest["seed"] = spec.hyper.seed;
    manifest["hyper"] = {{"d", spec.hyper.d},
                         {"lr0", spec.hyper.lr0},
                         {"lr_end", spec.hyper.lr_end},
                         {"momentum", spec.hyper.momentum},
                         {"epochs", spec.hyper.epochs},
                         {"batch_size", spec.hyper.batch_size},
                         {"lambda_t", spec.hyper.lambda_t},
                         {"lambda_c", spec.hyper.lambda_c},
                         {"lambda_dist", spec.hyper.lambda_dist},
                         {"train_biases", spec.hyper.train_biases},
                         {"split_user_embeddings", spec.hyper.split_user_embeddings}};
    manifest["epoch_losses"] = epoch_losses_json(result.epoch_losses);
    manifest["validation_nll"] = result.validation_nll;
    manifest["model_format"] = kModelFormatVersion;
    manifest["model_path"] = model_out;
    write_json(model_out + ".manifest.json", manifest);
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    cfg.validate_keys();
    cfg.require({"eval.model"});
    const std::string out_dir = cfg.get_string("out.dir", ".");
    const std::string model_path = cfg.get_string("eval.model");
    SplitDir paths(out_dir);

    EmbeddingModel model = load_model(model_path);
    std::vector<Interaction> test = read_events_tsv(paths.test);
    for (const auto& ev : test)
        if (ev.user >= model.n_users || ev.item >= model.n_items)
            throw Error(ErrorKind::FormatError,
                        "test event (" + std::to_string(ev.user) + "," +
                            std::to_string(ev.item) + ") is outside the model's universe");

    // The run manifest next to the model is the source of truth for what
    // was trained; config keys fill in when it is absent.
    TrainSpec spec;
    spec.hyper = hyper_from(cfg);
    std::ifstream mf(model_path + ".manifest.json");
    if (mf) {
        json j = json::parse(mf);
        spec.method = method_from_string(j["method"].get<std::string>());
        std::string adapt = j["adaptation"].get<std::string>();
        if (adapt == "prod-c" || adapt == "prod-t") {
            spec.adaptation = Adaptation::Prod;
            spec.predict_branch = adapt == "prod-c" ? Branch::Control : Branch::Treatment;
        } else {
            spec.adaptation = adaptation_from_string(adapt);
        }
        spec.hyper.seed = j["seed"].get<std::uint64_t>();
    } else {
        cfg.require({"train.method", "train.adaptation"});
        spec = spec_from(cfg);
    }
    spec.validate();

    MetricReport report = evaluate(spec, model, test);
    const std::string csv = cfg.get_string("eval.output", out_dir + "/metrics.csv");
    append_csv_row(csv, MetricReport::csv_header(), report.csv_row());

    char line[256];
    std::snprintf(line, sizeof(line),
                  "%s-%s seed=%llu: mse=%.5f nll=%.5f auc=%.5f mse_lift=%+.2f%% nll_lift=%+.2f%%",
                  report.method.c_str(), report.adaptation.c_str(),
                  static_cast<unsigned long long>(report.seed), report.mse, report.nll,
                  report.auc, 100.0 * report.mse_lift, 100.0 * report.nll_lift);
    out << line << "\n";
}

namespace {

struct SweepJob {
    double fraction = 0.0;
    std::string method_tag;
    std::uint64_t seed = 0;
    std::string row;
    std::string status = "ok";
};

std::size_t sweep_threads() {
    const char* env = std::getenv("CAUSE_THREADS");
    if (!env) return 1;
    long v = std::strtol(env, nullptr, 10);
    return v < 1 ? 1 : static_cast<std::size_t>(v);
}

}  // namespace

void cmd_sweep(const RunConfig& cfg) {
    cfg.validate_keys();
    cfg.require({"data.path"});
    const std::string out_dir = cfg.get_string("out.dir", ".");
    if (cfg.get_string("split.protocol", "skew") != "skew")
        throw Error(ErrorKind::ConfigError, "sweep needs the skew protocol");

    const auto format = ratings_format_from_string(cfg.get_string("data.format", "comma"));
    const auto fractions =
        cfg.get_double_list("sweep.fractions", {0.02, 0.04, 0.06, 0.08, 0.10});
    const auto methods = cfg.get_string_list("sweep.methods", {"cause-prod-c"});
    const auto seeds = cfg.get_u64_list("seeds", {cfg.get_u64("seed", 42)});

    Dataset ds = load_dataset(cfg.get_string("data.path"), format);
    ds.check();

    // One skew bundle per seed, with the treatment train events in a
    // seed-stable injection order so smaller fractions are prefixes of
    // larger ones.
    struct SeedData {
        SplitBundle bundle;
        std::vector<Interaction> injection_order;
    };
    std::vector<SeedData> per_seed(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        RunConfig sub = cfg;
        sub.merge_override("seed", std::to_string(seeds[i]));
        SplitConfig sc = split_config_from(sub);
        per_seed[i].bundle = skew_split(ds, sc);
        per_seed[i].injection_order = per_seed[i].bundle.train_treatment;
        Rng rng(seeds[i], "sweep.inject");
        rng.shuffle(per_seed[i].injection_order);
    }

    std::vector<SweepJob> jobs;
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (double f : fractions)
            for (const auto& m : methods) {
                SweepJob job;
                job.fraction = f;
                job.method_tag = m;
                job.seed = seeds[i];
                jobs.push_back(std::move(job));
            }

    const HyperParams base_hyper = hyper_from(cfg);
    auto run_job = [&](SweepJob& job, const SeedData& sd) {
        char prefix[160];
        std::snprintf(prefix, sizeof(prefix), "%.17g,%s,%llu", job.fraction,
                      job.method_tag.c_str(), static_cast<unsigned long long>(job.seed));
        try {
            HyperParams hp = base_hyper;
            hp.seed = job.seed;
            TrainSpec spec = spec_from_tag(job.method_tag, hp);

            SplitBundle bundle = sd.bundle;
            const std::size_t n_total = sd.bundle.total_events();
            std::size_t n_inject = static_cast<std::size_t>(
                std::llround(job.fraction * static_cast<double>(n_total)));
            n_inject = std::min(n_inject, sd.injection_order.size());
            bundle.train_treatment.assign(sd.injection_order.begin(),
                                          sd.injection_order.begin() + n_inject);

            TrainResult result = train(bundle, spec);
            MetricReport report = evaluate(spec, result.model, bundle.test);
            job.row = std::string(prefix) + "," + report.csv_row() + ",ok";
        } catch (const Error& e) {
            job.status = std::string("skipped:") + error_kind_name(e.kind());
            job.row = std::string(prefix) + std::string(13, ',') + job.status;
        }
    };

    const std::size_t n_threads = std::min(sweep_threads(), jobs.size());
    if (n_threads <= 1) {
        for (auto& job : jobs) {
            std::size_t seed_idx = 0;
            while (seeds[seed_idx] != job.seed) ++seed_idx;
            run_job(job, per_seed[seed_idx]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                std::size_t k = next.fetch_add(1);
                if (k >= jobs.size()) break;
                std::size_t seed_idx = 0;
                while (seeds[seed_idx] != jobs[k].seed) ++seed_idx;
                run_job(jobs[k], per_seed[seed_idx]);
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    fs::create_directories(out_dir);
    const std::string csv_path = cfg.get_string("sweep.output", out_dir + "/sweep.csv");
    {
        std::ofstream out(csv_path);
        if (!out) throw Error(ErrorKind::IoError, "cannot write " + csv_path);
        out << "fraction,method_tag,run_seed," << MetricReport::csv_header() << ",status\n";
        for (const auto& job : jobs) out << job.row << "\n";
    }

    json manifest;
    manifest["kind"] = "sweep";
    manifest["config"] = config_echo(cfg);
    manifest["rng"] = kRngAlgorithm;
    manifest["fractions"] = fractions;
    manifest["methods"] = methods;
    json seed_arr = json::array();
    for (auto s : seeds) seed_arr.push_back(s);
    manifest["seeds"] = seed_arr;
    manifest["rows"] = jobs.size();
    manifest["output"] = csv_path;
    manifest["formats"] = {{"metrics", kMetricsFormatVersion}};
    write_json(out_dir + "/sweep_manifest.json", manifest);
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    cfg.validate_keys();
    const std::size_t n_worlds = static_cast<std::size_t>(cfg.get_int("sim.worlds", 3));
    const std::size_t n_users = static_cast<std::size_t>(cfg.get_int("sim.users", 4));
    const std::size_t n_items = static_cast<std::size_t>(cfg.get_int("sim.items", 4));
    const std::size_t n_samples = static_cast<std::size_t>(cfg.get_int("sim.samples", 10000));
    const double beta = cfg.get_double("sim.beta", 1.0);
    const bool include_null = cfg.get_bool("sim.include_null_item", false);
    const std::uint64_t seed = cfg.get_u64("seed", 42);

    out << "world\tpolicy\texact_reward\tips_estimate\tstd_error\n";
    for (std::size_t wi = 0; wi < n_worlds; ++wi) {
        Rng rng(seed, "sim.world." + std::to_string(wi));
        SynthWorld world;
        world.n_users = n_users;
        world.n_items = n_items;
        world.reward.resize(n_users * n_items);
        for (auto& r : world.reward) r = rng.uniform();
        world.user_prob.assign(n_users, 1.0 / static_cast<double>(n_users));
        if (include_null) world = world.with_null_item();
        world.check();

        std::vector<double> pop(world.n_items);
        for (std::size_t j = 0; j < world.n_items; ++j)
            pop[j] = static_cast<double>(j + 1);
        Policy logging = Policy::popularity(world.n_users, pop, beta);
        LoggedSample sample = sample_logged(world, logging, n_samples, rng);

        struct Target {
            const char* name;
            Policy policy;
        };
        std::vector<Target> targets;
        targets.push_back({"uniform", Policy::uniform(world.n_users, world.n_items)});
        targets.push_back({"best", best_policy(world)});
        for (const auto& t : targets) {
            double exact = policy_reward(world, t.policy);
            IpsResult est = ips_estimate_with_se(sample, t.policy);
            char line[160];
            std::snprintf(line, sizeof(line), "%zu\t%s\t%.6f\t%.6f\t%.6f", wi, t.name, exact,
                          est.estimate, est.std_error);
            out << line << "\n";
        }
    }
}

}  // namespace cause
