#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cause/types.hpp"

namespace cause {

// Pre-binarization record, one per ratings-file line.
struct RawRating {
    std::string user_token;
    std::string item_token;
    double rating = 0.0;
    std::int64_t timestamp = 0;  // retained but unused downstream
};

enum class RatingsFormat { DoubleColon, Comma };

RatingsFormat ratings_format_from_string(const std::string& s);
const char* ratings_format_name(RatingsFormat f);

// Parses "user<sep>item<sep>rating<sep>timestamp" lines. A first line
// whose rating field is non-numeric is treated as a header and skipped.
// Throws MalformedLine (with the 1-based line number) on wrong field
// count or an unparseable rating.
std::vector<RawRating> parse_ratings(std::istream& in, RatingsFormat format);
std::vector<RawRating> parse_ratings_file(const std::string& path, RatingsFormat format);

// 1 iff the rating is a full five stars (within 1e-9), else 0.
std::uint8_t binarize(double rating);

// Registers ids in first-appearance order and binarizes every record.
// All interactions start with origin Control; the splitter reassigns it.
Dataset build_dataset(const std::vector<RawRating>& raw);

Dataset load_dataset(const std::string& path, RatingsFormat format);

}  // namespace cause
