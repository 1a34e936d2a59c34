#include "cause/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cause {

void write_events_tsv(const std::string& path, const std::vector<Interaction>& events) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error(ErrorKind::IoError, "cannot write split file: " + path);
    std::fprintf(f, "user\titem\tlabel\torigin\n");
    for (const auto& ev : events)
        std::fprintf(f, "%u\t%u\t%u\t%c\n", ev.user, ev.item, ev.label, origin_code(ev.origin));
    std::fclose(f);
}

std::vector<Interaction> read_events_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open split file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "user\titem\tlabel\torigin")
        throw Error(ErrorKind::FormatError, path + ": missing split file header");
    std::vector<Interaction> events;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        unsigned long user, item;
        unsigned int label;
        char origin;
        if (!(row >> user >> item >> label >> origin) || label > 1 ||
            (origin != 'c' && origin != 't') || user > 0xffffffffUL || item > 0xffffffffUL)
            throw Error(ErrorKind::FormatError,
                        path + ": line " + std::to_string(line_no) + ": bad event row");
        Interaction ev;
        ev.user = static_cast<std::uint32_t>(user);
        ev.item = static_cast<std::uint32_t>(item);
        ev.label = static_cast<std::uint8_t>(label);
        ev.origin = origin == 'c' ? Origin::Control : Origin::Treatment;
        events.push_back(ev);
    }
    return events;
}

void write_propensity_tsv(const std::string& path, const PropensityTable& table) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error(ErrorKind::IoError, "cannot write propensity file: " + path);
    std::fprintf(f, "item\tcontrol_prob\tweight\n");
    for (std::size_t j = 0; j < table.n_items(); ++j)
        std::fprintf(f, "%zu\t%.17g\t%.17g\n", j, table.control_prob[j], table.weight[j]);
    std::fclose(f);
}

PropensityTable read_propensity_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open propensity file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "item\tcontrol_prob\tweight")
        throw Error(ErrorKind::FormatError, path + ": missing propensity header");
    PropensityTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::size_t item;
        double prob, weight;
        if (!(row >> item >> prob >> weight) || item != table.control_prob.size())
            throw Error(ErrorKind::FormatError,
                        path + ": line " + std::to_string(line_no) + ": bad propensity row");
        table.control_prob.push_back(prob);
        table.weight.push_back(weight);
    }
    const std::size_t n = table.control_prob.size();
    if (n == 0) throw Error(ErrorKind::FormatError, path + ": empty propensity table");
    table.treatment_prob.assign(n, 1.0 / static_cast<double>(n));
    return table;
}

void append_csv_row(const std::string& path, const std::string& header, const std::string& row) {
    namespace fs = std::filesystem;
    bool need_header = true;
    std::error_code ec;
    if (fs::exists(path, ec) && fs::file_size(path, ec) > 0) need_header = false;
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error(ErrorKind::IoError, "cannot append to " + path);
    if (need_header) out << header << "\n";
    out << row << "\n";
}

}  // namespace cause
