#include "cause/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace cause {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "data.path",
        "data.format",
        "out.dir",
        "seed",
        "seeds",
        "split.protocol",
        "split.skew_test_pool",
        "split.test_fraction",
        "split.treatment_train_fraction",
        "split.validation_fraction",
        "split.move_cap",
        "split.propensity_cap",
        "train.method",
        "train.adaptation",
        "train.predict_branch",
        "train.banditnet_lambda",
        "train.ratio_cap",
        "train.model_out",
        "hyper.d",
        "hyper.lr0",
        "hyper.lr_end",
        "hyper.momentum",
        "hyper.epochs",
        "hyper.batch_size",
        "hyper.lambda_t",
        "hyper.lambda_c",
        "hyper.lambda_dist",
        "hyper.train_biases",
        "hyper.split_user_embeddings",
        "eval.output",
        "eval.model",
        "sweep.fractions",
        "sweep.methods",
        "sweep.output",
        "sim.worlds",
        "sim.users",
        "sim.items",
        "sim.samples",
        "sim.beta",
        "sim.include_null_item",
    };
    return keys;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::ConfigError,
                        path + ": line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw Error(ErrorKind::ConfigError,
                        path + ": line " + std::to_string(line_no) + ": empty key");
        cfg.values_[key] = value;
    }
    return cfg;
}

RunConfig RunConfig::from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
    RunConfig cfg;
    for (const auto& [k, v] : pairs) cfg.values_[k] = v;
    return cfg;
}

void RunConfig::merge_override(const std::string& key, const std::string& value) {
    values_[key] = value;
}

void RunConfig::validate_keys() const {
    for (const auto& [k, _] : values_)
        if (!known_keys().count(k))
            throw Error(ErrorKind::ConfigError, "unknown config key: " + k);
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw Error(ErrorKind::ConfigError, "missing required config key: " + key);
    return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    char* end = nullptr;
    double v = std::strtod(it->second.c_str(), &end);
    if (end != it->second.c_str() + it->second.size() || it->second.empty())
        throw Error(ErrorKind::ConfigError, "config key " + key + " is not a number");
    return v;
}

std::int64_t RunConfig::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    char* end = nullptr;
    long long v = std::strtoll(it->second.c_str(), &end, 10);
    if (end != it->second.c_str() + it->second.size() || it->second.empty())
        throw Error(ErrorKind::ConfigError, "config key " + key + " is not an integer");
    return v;
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    char* end = nullptr;
    unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
    if (end != it->second.c_str() + it->second.size() || it->second.empty())
        throw Error(ErrorKind::ConfigError, "config key " + key + " is not an integer");
    return v;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorKind::ConfigError, "config key " + key + " is not a boolean");
}

std::vector<double> RunConfig::get_double_list(const std::string& key,
                                               const std::vector<double>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& part : split_list(it->second)) {
        char* end = nullptr;
        out.push_back(std::strtod(part.c_str(), &end));
        if (end != part.c_str() + part.size())
            throw Error(ErrorKind::ConfigError, "config key " + key + " has a non-number entry");
    }
    if (out.empty()) throw Error(ErrorKind::ConfigError, "config key " + key + " is empty");
    return out;
}

std::vector<std::uint64_t> RunConfig::get_u64_list(
    const std::string& key, const std::vector<std::uint64_t>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::uint64_t> out;
    for (const auto& part : split_list(it->second)) {
        char* end = nullptr;
        out.push_back(std::strtoull(part.c_str(), &end, 10));
        if (end != part.c_str() + part.size())
            throw Error(ErrorKind::ConfigError, "config key " + key + " has a non-integer entry");
    }
    if (out.empty()) throw Error(ErrorKind::ConfigError, "config key " + key + " is empty");
    return out;
}

std::vector<std::string> RunConfig::get_string_list(
    const std::string& key, const std::vector<std::string>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto out = split_list(it->second);
    if (out.empty()) throw Error(ErrorKind::ConfigError, "config key " + key + " is empty");
    return out;
}

void RunConfig::require(const std::vector<std::string>& keys) const {
    for (const auto& k : keys)
        if (!has(k)) throw Error(ErrorKind::ConfigError, "missing required config key: " + k);
}

}  // namespace cause
