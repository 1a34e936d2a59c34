#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cause/evaluation.hpp"
#include "cause/ingestion.hpp"
#include "cause/model.hpp"
#include "cause/policy_lab.hpp"
#include "cause/splitter.hpp"
#include "cause/synth.hpp"
#include "cause/trainers.hpp"

namespace py = pybind11;
using namespace cause;

namespace {

Branch branch_from(const std::string& s) {
    if (s == "control") return Branch::Control;
    if (s == "treatment") return Branch::Treatment;
    throw Error(ErrorKind::ConfigError, "branch must be control or treatment");
}

SynthWorld make_world(const std::vector<std::vector<double>>& reward,
                      const std::vector<double>& user_prob) {
    SynthWorld w;
    w.n_users = reward.size();
    w.n_items = reward.empty() ? 0 : reward[0].size();
    for (const auto& row : reward) {
        if (row.size() != w.n_items)
            throw Error(ErrorKind::ShapeMismatch, "ragged reward matrix");
        w.reward.insert(w.reward.end(), row.begin(), row.end());
    }
    w.user_prob = user_prob;
    w.check();
    return w;
}

Policy make_policy(const std::vector<std::vector<double>>& expose) {
    Policy p;
    p.n_users = expose.size();
    p.n_items = expose.empty() ? 0 : expose[0].size();
    for (const auto& row : expose) {
        if (row.size() != p.n_items)
            throw Error(ErrorKind::ShapeMismatch, "ragged policy matrix");
        p.expose.insert(p.expose.end(), row.begin(), row.end());
    }
    p.check();
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "causal embedding toolkit core";

    py::register_exception<Error>(m, "CauseError");

    py::class_<Interaction>(m, "Interaction")
        .def(py::init([](std::uint32_t user, std::uint32_t item, int label, std::string origin) {
                 Interaction ev;
                 ev.user = user;
                 ev.item = item;
                 ev.label = label ? 1 : 0;
                 ev.origin = origin == "t" ? Origin::Treatment : Origin::Control;
                 return ev;
             }),
             py::arg("user"), py::arg("item"), py::arg("label"), py::arg("origin") = "c")
        .def_readonly("user", &Interaction::user)
        .def_readonly("item", &Interaction::item)
        .def_readonly("label", &Interaction::label)
        .def_property_readonly(
            "origin", [](const Interaction& ev) { return std::string(1, origin_code(ev.origin)); })
        .def("__repr__", [](const Interaction& ev) {
            return "Interaction(user=" + std::to_string(ev.user) +
                   ", item=" + std::to_string(ev.item) + ", label=" + std::to_string(ev.label) +
                   ", origin='" + std::string(1, origin_code(ev.origin)) + "')";
        });

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("n_users", &Dataset::n_users)
        .def_readonly("n_items", &Dataset::n_items)
        .def_readonly("interactions", &Dataset::interactions)
        .def("__len__", [](const Dataset& d) { return d.interactions.size(); });

    m.def(
        "load_dataset",
        [](const std::string& path, const std::string& format) {
            return load_dataset(path, ratings_format_from_string(format));
        },
        py::arg("path"), py::arg("format") = "comma");

    m.def(
        "build_dataset",
        [](const std::vector<std::tuple<std::string, std::string, double>>& rows) {
            std::vector<RawRating> raw;
            raw.reserve(rows.size());
            for (const auto& [u, i, r] : rows) raw.push_back({u, i, r, 0});
            return build_dataset(raw);
        },
        py::arg("rows"), "build a dataset from (user, item, rating) tuples");

    m.def("binarize", &binarize, py::arg("rating"));

    py::class_<PropensityTable>(m, "PropensityTable")
        .def_readonly("control_prob", &PropensityTable::control_prob)
        .def_readonly("treatment_prob", &PropensityTable::treatment_prob)
        .def_readonly("weight", &PropensityTable::weight);

    py::class_<SplitBundle>(m, "SplitBundle")
        .def_readonly("train_control", &SplitBundle::train_control)
        .def_readonly("train_treatment", &SplitBundle::train_treatment)
        .def_readonly("validation", &SplitBundle::validation)
        .def_readonly("test", &SplitBundle::test)
        .def_readonly("propensity", &SplitBundle::propensity)
        .def("total_events", &SplitBundle::total_events);

    m.def(
        "make_split",
        [](const Dataset& ds, const std::string& protocol, std::uint64_t seed,
           double skew_test_pool, double test_fraction, double treatment_train_fraction,
           double validation_fraction, double move_cap, double propensity_cap) {
            SplitConfig sc;
            sc.protocol = protocol == "reg" ? Protocol::Reg : Protocol::Skew;
            sc.seed = seed;
            sc.skew_test_pool = skew_test_pool;
            sc.test_fraction = test_fraction;
            sc.treatment_train_fraction = treatment_train_fraction;
            sc.validation_fraction = validation_fraction;
            sc.move_cap = move_cap;
            sc.propensity_cap = propensity_cap;
            return make_split(ds, sc);
        },
        py::arg("dataset"), py::arg("protocol") = "skew", py::arg("seed") = 42,
        py::arg("skew_test_pool") = 0.30, py::arg("test_fraction") = 0.20,
        py::arg("treatment_train_fraction") = 0.10, py::arg("validation_fraction") = 0.10,
        py::arg("move_cap") = 0.9, py::arg("propensity_cap") = 10.0);

    py::class_<HyperParams>(m, "HyperParams")
        .def(py::init<>())
        .def_readwrite("d", &HyperParams::d)
        .def_readwrite("lr0", &HyperParams::lr0)
        .def_readwrite("lr_end", &HyperParams::lr_end)
        .def_readwrite("momentum", &HyperParams::momentum)
        .def_readwrite("epochs", &HyperParams::epochs)
        .def_readwrite("batch_size", &HyperParams::batch_size)
        .def_readwrite("lambda_t", &HyperParams::lambda_t)
        .def_readwrite("lambda_c", &HyperParams::lambda_c)
        .def_readwrite("lambda_dist", &HyperParams::lambda_dist)
        .def_readwrite("seed", &HyperParams::seed)
        .def_readwrite("train_biases", &HyperParams::train_biases)
        .def_readwrite("split_user_embeddings", &HyperParams::split_user_embeddings);

    py::class_<TrainSpec>(m, "TrainSpec")
        .def(py::init([](const std::string& method, const std::string& adaptation,
                         const std::string& predict_branch, HyperParams hyper,
                         double banditnet_lambda, double ratio_cap) {
                 TrainSpec spec;
                 spec.method = method_from_string(method);
                 spec.adaptation = adaptation_from_string(adaptation);
                 spec.predict_branch = branch_from(predict_branch);
                 spec.hyper = hyper;
                 spec.banditnet_lambda = banditnet_lambda;
                 spec.ratio_cap = ratio_cap;
                 spec.validate();
                 return spec;
             }),
             py::arg("method"), py::arg("adaptation"), py::arg("predict_branch") = "control",
             py::arg("hyper") = HyperParams(), py::arg("banditnet_lambda") = 0.0,
             py::arg("ratio_cap") = 100.0)
        .def_readwrite("hyper", &TrainSpec::hyper)
        .def_property_readonly("method",
                               [](const TrainSpec& s) { return method_name(s.method); })
        .def_property_readonly(
            "adaptation", [](const TrainSpec& s) { return adaptation_name(s.adaptation); })
        .def("tag", &TrainSpec::tag);

    py::class_<EmbeddingModel>(m, "EmbeddingModel")
        .def_readonly("n_users", &EmbeddingModel::n_users)
        .def_readonly("n_items", &EmbeddingModel::n_items)
        .def_readonly("d", &EmbeddingModel::d)
        .def_readonly("alpha", &EmbeddingModel::alpha)
        .def_readonly("global_bias", &EmbeddingModel::global_bias)
        .def(
            "predict",
            [](const EmbeddingModel& m_, std::size_t user, std::size_t item,
               const std::string& branch) { return predict(m_, user, item, branch_from(branch)); },
            py::arg("user"), py::arg("item"), py::arg("branch") = "control")
        .def("save", [](const EmbeddingModel& m_, const std::string& path) {
            save_model(m_, path);
        });

    m.def("load_model", &load_model, py::arg("path"));

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("epoch_losses", &TrainResult::epoch_losses)
        .def_readonly("validation_nll", &TrainResult::validation_nll);

    m.def("train", &train, py::arg("bundle"), py::arg("spec"));
    m.def("predict_for", &predict_for, py::arg("spec"), py::arg("model"), py::arg("user"),
          py::arg("item"));

    py::class_<MetricReport>(m, "MetricReport")
        .def_readonly("method", &MetricReport::method)
        .def_readonly("adaptation", &MetricReport::adaptation)
        .def_readonly("seed", &MetricReport::seed)
        .def_readonly("n_events", &MetricReport::n_events)
        .def_readonly("avg_cr", &MetricReport::avg_cr)
        .def_readonly("mse", &MetricReport::mse)
        .def_readonly("nll", &MetricReport::nll)
        .def_readonly("auc", &MetricReport::auc)
        .def_readonly("mse_lift", &MetricReport::mse_lift)
        .def_readonly("nll_lift", &MetricReport::nll_lift)
        .def_readonly("raw_mse_lift", &MetricReport::raw_mse_lift)
        .def_readonly("raw_nll_lift", &MetricReport::raw_nll_lift)
        .def("csv_row", &MetricReport::csv_row);

    m.def("evaluate", &evaluate, py::arg("spec"), py::arg("model"), py::arg("test_events"));

    m.def(
        "auc",
        [](const std::vector<double>& preds, const std::vector<double>& labels) {
            return auc(preds, labels);
        },
        py::arg("preds"), py::arg("labels"));
    m.def("xent", &xent, py::arg("p"), py::arg("y"));
    m.def("sigmoid", &sigmoid, py::arg("x"));
    m.def("lr_at", &lr_at, py::arg("step"), py::arg("total_steps"), py::arg("lr0"),
          py::arg("lr_end"));

    py::class_<SynthWorld>(m, "World")
        .def(py::init(&make_world), py::arg("reward"), py::arg("user_prob"))
        .def_readonly("n_users", &SynthWorld::n_users)
        .def_readonly("n_items", &SynthWorld::n_items)
        .def("with_null_item", &SynthWorld::with_null_item);

    py::class_<Policy>(m, "Policy")
        .def(py::init(&make_policy), py::arg("expose"))
        .def_static("uniform", &Policy::uniform, py::arg("n_users"), py::arg("n_items"))
        .def_static("deterministic", &Policy::deterministic, py::arg("n_users"),
                    py::arg("n_items"), py::arg("item_per_user"))
        .def_static("popularity", &Policy::popularity, py::arg("n_users"), py::arg("weights"),
                    py::arg("beta"))
        .def_readonly("n_users", &Policy::n_users)
        .def_readonly("n_items", &Policy::n_items)
        .def("prob", &Policy::p, py::arg("user"), py::arg("item"));

    m.def("policy_reward", &policy_reward, py::arg("world"), py::arg("policy"));
    m.def("ite", &ite, py::arg("world"), py::arg("policy"), py::arg("control"));
    m.def("best_policy", &best_policy, py::arg("world"));
    m.def(
        "sample_logged",
        [](const SynthWorld& world, const Policy& logging, std::size_t n, std::uint64_t seed) {
            Rng rng(seed, "py.sample");
            auto sample = sample_logged(world, logging, n, rng);
            std::vector<std::tuple<std::size_t, std::size_t, double, double>> out;
            out.reserve(sample.size());
            for (const auto& ev : sample)
                out.emplace_back(ev.user, ev.item, ev.outcome, ev.logging_prob);
            return out;
        },
        py::arg("world"), py::arg("logging"), py::arg("n"), py::arg("seed") = 42);
    m.def(
        "ips_estimate",
        [](const std::vector<std::tuple<std::size_t, std::size_t, double, double>>& events,
           const Policy& target) {
            LoggedSample sample;
            sample.reserve(events.size());
            for (const auto& [u, i, y, p] : events) sample.push_back({u, i, y, p});
            return ips_estimate(sample, target);
        },
        py::arg("sample"), py::arg("target"));
    m.def("argmax_rand_equivalence", &argmax_rand_equivalence, py::arg("world"),
          py::arg("control"));

    m.def(
        "write_synth_ratings",
        [](const std::string& path, std::size_t n_users, std::size_t n_items,
           std::size_t n_events, std::uint64_t seed) {
            SynthSpec spec;
            spec.n_users = n_users;
            spec.n_items = n_items;
            spec.n_events = n_events;
            spec.seed = seed;
            write_ratings_csv(path, synth_ratings(spec));
        },
        py::arg("path"), py::arg("n_users") = 943, py::arg("n_items") = 1682,
        py::arg("n_events") = 100000, py::arg("seed") = 7001);
}
