#include "cause/ingestion.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

namespace cause {

RatingsFormat ratings_format_from_string(const std::string& s) {
    if (s == "dcolon" || s == "double-colon" || s == "::") return RatingsFormat::DoubleColon;
    if (s == "comma" || s == "csv" || s == ",") return RatingsFormat::Comma;
    throw Error(ErrorKind::ConfigError, "unknown ratings format: " + s);
}

const char* ratings_format_name(RatingsFormat f) {
    return f == RatingsFormat::DoubleColon ? "dcolon" : "comma";
}

namespace {

std::vector<std::string> split_fields(const std::string& line, RatingsFormat format) {
    std::vector<std::string> fields;
    if (format == RatingsFormat::Comma) {
        std::size_t start = 0;
        while (true) {
            std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
    } else {
        std::size_t start = 0;
        while (true) {
            std::size_t pos = line.find("::", start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 2;
        }
    }
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

std::vector<RawRating> parse_ratings(std::istream& in, RatingsFormat format) {
    std::vector<RawRating> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_fields(line, format);
        if (fields.size() != 4)
            throw Error(ErrorKind::MalformedLine,
                        "line " + std::to_string(line_no) + ": expected 4 fields, got " +
                            std::to_string(fields.size()));
        double rating = 0.0;
        if (!parse_double(fields[2], rating)) {
            if (line_no == 1 && out.empty()) continue;  // header
            throw Error(ErrorKind::MalformedLine,
                        "line " + std::to_string(line_no) + ": unparseable rating '" +
                            fields[2] + "'");
        }
        RawRating r;
        r.user_token = fields[0];
        r.item_token = fields[1];
        r.rating = rating;
        char* end = nullptr;
        r.timestamp = std::strtoll(fields[3].c_str(), &end, 10);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RawRating> parse_ratings_file(const std::string& path, RatingsFormat format) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open ratings file: " + path);
    return parse_ratings(in, format);
}

std::uint8_t binarize(double rating) {
    return std::fabs(rating - 5.0) <= 1e-9 ? 1 : 0;
}

Dataset build_dataset(const std::vector<RawRating>& raw) {
    if (raw.empty()) throw Error(ErrorKind::EmptyInput, "no ratings to build a dataset from");
    Dataset ds;
    ds.interactions.reserve(raw.size());
    for (const auto& r : raw) {
        Interaction ev;
        ev.user = ds.user_map.register_id(r.user_token);
        ev.item = ds.item_map.register_id(r.item_token);
        ev.label = binarize(r.rating);
        ev.origin = Origin::Control;
        ds.interactions.push_back(ev);
    }
    ds.n_users = static_cast<std::uint32_t>(ds.user_map.size());
    ds.n_items = static_cast<std::uint32_t>(ds.item_map.size());
    return ds;
}

Dataset load_dataset(const std::string& path, RatingsFormat format) {
    return build_dataset(parse_ratings_file(path, format));
}

}  // namespace cause
