#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cause/error.hpp"

namespace cause {

// Which policy logged an event: the biased production policy (Control)
// or the uniform-exposure policy (Treatment).
enum class Origin : std::uint8_t { Control, Treatment };

inline char origin_code(Origin o) { return o == Origin::Control ? 'c' : 't'; }

// One logged feedback event. Labels are stored as a bit but exposed to
// loss code as 0.0/1.0 through label_value().
struct Interaction {
    std::uint32_t user = 0;
    std::uint32_t item = 0;
    std::uint8_t label = 0;  // 0 or 1
    Origin origin = Origin::Control;

    double label_value() const { return label ? 1.0 : 0.0; }

    bool operator==(const Interaction&) const = default;
};

// Bijective external-id <-> dense-index map. Indices are assigned in
// first-appearance order, so registration is deterministic and embedding
// rows are addressable by index.
class IdMap {
public:
    std::uint32_t register_id(const std::string& external_id) {
        auto it = forward_.find(external_id);
        if (it != forward_.end()) return it->second;
        auto idx = static_cast<std::uint32_t>(backward_.size());
        forward_.emplace(external_id, idx);
        backward_.push_back(external_id);
        return idx;
    }

    bool contains(const std::string& external_id) const {
        return forward_.count(external_id) > 0;
    }

    std::uint32_t index_of(const std::string& external_id) const {
        auto it = forward_.find(external_id);
        if (it == forward_.end())
            throw Error(ErrorKind::LengthMismatch, "unregistered id: " + external_id);
        return it->second;
    }

    const std::string& id_of(std::uint32_t index) const { return backward_.at(index); }

    std::size_t size() const { return backward_.size(); }

private:
    std::unordered_map<std::string, std::uint32_t> forward_;
    std::vector<std::string> backward_;
};

struct Dataset {
    std::vector<Interaction> interactions;
    IdMap user_map;
    IdMap item_map;
    std::uint32_t n_users = 0;
    std::uint32_t n_items = 0;

    void check() const {
        if (n_users != user_map.size() || n_items != item_map.size())
            throw Error(ErrorKind::ShapeMismatch, "dataset counts disagree with id maps");
        for (const auto& ev : interactions) {
            if (ev.user >= n_users || ev.item >= n_items)
                throw Error(ErrorKind::ShapeMismatch, "interaction references unmapped index");
            if (ev.label > 1)
                throw Error(ErrorKind::ShapeMismatch, "label outside {0,1}");
        }
    }
};

// Per-item exposure probabilities under the logging policy (popularity
// marginal) and the uniform policy, plus the clipped importance weight.
struct PropensityTable {
    std::vector<double> control_prob;    // sums to 1 over items
    std::vector<double> treatment_prob;  // 1 / n_items
    std::vector<double> weight;          // min(treatment/control, cap)

    std::size_t n_items() const { return control_prob.size(); }
};

// The four event sets produced by a split protocol. Together they
// partition the source dataset's events.
struct SplitBundle {
    std::vector<Interaction> train_control;    // from the logging policy
    std::vector<Interaction> train_treatment;  // from the uniform policy
    std::vector<Interaction> validation;       // logging policy
    std::vector<Interaction> test;             // uniform policy
    PropensityTable propensity;

    std::size_t total_events() const {
        return train_control.size() + train_treatment.size() + validation.size() + test.size();
    }
};

}  // namespace cause
