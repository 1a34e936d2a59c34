#pragma once

#include <string>
#include <vector>

#include "cause/types.hpp"

namespace cause {

inline constexpr const char* kSplitFormatVersion = "split-tsv-1";
inline constexpr const char* kPropensityFormatVersion = "propensity-tsv-1";
inline constexpr const char* kMetricsFormatVersion = "metrics-csv-1";

// Tab-separated event files: header "user\titem\tlabel\torigin", dense
// indices, origin in {c,t}.
void write_events_tsv(const std::string& path, const std::vector<Interaction>& events);
std::vector<Interaction> read_events_tsv(const std::string& path);

// Tab-separated per-item table: header "item\tcontrol_prob\tweight".
// Uniform treatment probabilities are reconstructed from the row count.
void write_propensity_tsv(const std::string& path, const PropensityTable& table);
PropensityTable read_propensity_tsv(const std::string& path);

// Appends a CSV row, writing the header first when the file is new or empty.
void append_csv_row(const std::string& path, const std::string& header, const std::string& row);

}  // namespace cause
