#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cause/commands.hpp"
#include "cause/config.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("-c,--config", args.config_path, "flat key = value config file");
    sub->add_option("--set", args.overrides, "override as key=value (repeatable)")
        ->take_all();
}

cause::RunConfig build_config(const CommonArgs& args) {
    cause::RunConfig cfg;
    if (!args.config_path.empty()) cfg = cause::RunConfig::from_file(args.config_path);
    for (const auto& kv : args.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw cause::Error(cause::ErrorKind::ConfigError,
                               "--set expects key=value, got: " + kv);
        cfg.merge_override(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

int exit_code_for(const cause::Error& e) {
    switch (e.kind()) {
        case cause::ErrorKind::ConfigError: return 2;
        case cause::ErrorKind::NumericalFailure: return 3;
        default: return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal embedding toolkit: split, train, evaluate and simulate"};
    app.require_subcommand(1);

    CommonArgs prepare_args, train_args, eval_args, sweep_args, sim_args;
    std::string eval_model;

    CLI::App* prepare = app.add_subcommand(
        "prepare", "split a ratings file into the four event sets plus propensities");
    add_common(prepare, prepare_args);

    CLI::App* train =
        app.add_subcommand("train", "fit a model on prepared split files");
    add_common(train, train_args);

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "score a trained model on the test split");
    add_common(evaluate, eval_args);
    evaluate->add_option("-m,--model", eval_model, "model file (overrides eval.model)");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "metrics as a function of the injected treatment fraction");
    add_common(sweep, sweep_args);

    CLI::App* simulate = app.add_subcommand(
        "simulate", "exact versus importance-weighted policy rewards on toy worlds");
    add_common(simulate, sim_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed()) {
            cause::cmd_prepare(build_config(prepare_args));
        } else if (train->parsed()) {
            cause::cmd_train(build_config(train_args));
        } else if (evaluate->parsed()) {
            auto cfg = build_config(eval_args);
            if (!eval_model.empty()) cfg.merge_override("eval.model", eval_model);
            cause::cmd_evaluate(cfg, std::cout);
        } else if (sweep->parsed()) {
            cause::cmd_sweep(build_config(sweep_args));
        } else if (simulate->parsed()) {
            cause::cmd_simulate(build_config(sim_args), std::cout);
        }
    } catch (const cause::Error& e) {
        std::cerr << "error: " << cause::error_kind_name(e.kind()) << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
