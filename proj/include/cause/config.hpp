#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cause/error.hpp"

namespace cause {

// Flat key=value configuration. Files use one `key = value` pair per
// line with '#' comments; command-line --set pairs override file values.
// Keys outside the known registry are rejected up front.
class RunConfig {
public:
    static RunConfig from_file(const std::string& path);
    static RunConfig from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

    void merge_override(const std::string& key, const std::string& value);
    void validate_keys() const;

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<std::uint64_t> get_u64_list(const std::string& key,
                                            const std::vector<std::uint64_t>& fallback) const;
    std::vector<std::string> get_string_list(const std::string& key,
                                             const std::vector<std::string>& fallback) const;

    void require(const std::vector<std::string>& keys) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace cause
