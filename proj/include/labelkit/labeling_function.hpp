#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <memory>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "labelkit/errors.hpp"
#include "labelkit/types.hpp"

namespace labelkit {

// A labeling function: a named, deterministic heuristic mapping a record to
// a vote. Evaluators must be pure and must read only lf_fields; the template
// constructors below guarantee both, so they are safe to run from any worker.
struct LabelingFunction {
    std::string name;
    std::function<Vote(const Record&)> evaluator;
};

// Per-LF count of evaluator failures; a faulting evaluator abstains instead
// of aborting the run, and the tally is reported at the end.
struct FaultTally {
    std::vector<std::string> lf_names;
    std::vector<std::uint64_t> faults;

    std::uint64_t total() const {
        std::uint64_t sum = 0;
        for (auto f : faults) sum += f;
        return sum;
    }
};

inline Vote apply_lf(const LabelingFunction& lf, const Record& record, std::uint64_t* fault_count = nullptr) {
    try {
        return lf.evaluator(record);
    } catch (...) {
        if (fault_count) ++*fault_count;
        return kVoteAbstain;
    }
}

namespace detail {

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline const std::string* text_field(const Record& record, const std::string& field) {
    auto it = record.lf_fields.find(field);
    if (it == record.lf_fields.end()) return nullptr;
    return std::get_if<std::string>(&it->second);
}

inline const double* numeric_field(const Record& record, const std::string& field) {
    auto it = record.lf_fields.find(field);
    if (it == record.lf_fields.end()) return nullptr;
    return std::get_if<double>(&it->second);
}

inline void check_polarity(int polarity) {
    if (polarity != -1 && polarity != 1) {
        throw ConfigError("polarity must be -1 or +1, got " + std::to_string(polarity));
    }
}

}  // namespace detail

// Votes `polarity` when any keyword occurs as a case-insensitive substring
// of the named text field; abstains otherwise (including missing field).
inline LabelingFunction make_keyword_lf(std::string name, std::string field,
                                        const std::set<std::string>& keywords, int polarity) {
    detail::check_polarity(polarity);
    if (keywords.empty()) throw ConfigError("keyword LF '" + name + "' needs a nonempty keyword set");
    auto lowered = std::make_shared<std::vector<std::string>>();
    for (const auto& k : keywords) lowered->push_back(detail::ascii_lower(k));
    Vote vote = static_cast<Vote>(polarity);
    return {std::move(name), [field = std::move(field), lowered, vote](const Record& record) -> Vote {
                const std::string* value = detail::text_field(record, field);
                if (!value) return kVoteAbstain;
                std::string haystack = detail::ascii_lower(*value);
                for (const auto& needle : *lowered) {
                    if (haystack.find(needle) != std::string::npos) return vote;
                }
                return kVoteAbstain;
            }};
}

// Votes `polarity` when the regular expression matches anywhere in the
// named text field.
inline LabelingFunction make_pattern_lf(std::string name, std::string field, const std::string& pattern,
                                        int polarity) {
    detail::check_polarity(polarity);
    std::shared_ptr<const std::regex> re;
    try {
        re = std::make_shared<const std::regex>(pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
        throw InvalidPatternError("pattern LF '" + name + "': cannot compile '" + pattern + "': " + e.what());
    }
    Vote vote = static_cast<Vote>(polarity);
    return {std::move(name), [field = std::move(field), re, vote](const Record& record) -> Vote {
                const std::string* value = detail::text_field(record, field);
                if (!value) return kVoteAbstain;
                return std::regex_search(*value, *re) ? vote : kVoteAbstain;
            }};
}

enum class ThresholdDirection { Above, Below };

// Votes `polarity` when the numeric field is >= threshold (Above) or
// <= threshold (Below); comparisons are inclusive. Missing or non-numeric
// fields abstain.
inline LabelingFunction make_threshold_lf(std::string name, std::string field, double threshold,
                                          ThresholdDirection direction, int polarity) {
    detail::check_polarity(polarity);
    Vote vote = static_cast<Vote>(polarity);
    return {std::move(name),
            [field = std::move(field), threshold, direction, vote](const Record& record) -> Vote {
                const double* value = detail::numeric_field(record, field);
                if (!value) return kVoteAbstain;
                bool hit = (direction == ThresholdDirection::Above) ? (*value >= threshold) : (*value <= threshold);
                return hit ? vote : kVoteAbstain;
            }};
}

// Votes `polarity` when the whole field value, trimmed and case-folded,
// appears in the dictionary.
inline LabelingFunction make_lookup_lf(std::string name, std::string field,
                                       const std::set<std::string>& dictionary, int polarity) {
    detail::check_polarity(polarity);
    if (dictionary.empty()) throw ConfigError("lookup LF '" + name + "' needs a nonempty dictionary");
    auto folded = std::make_shared<std::set<std::string>>();
    for (const auto& entry : dictionary) folded->insert(detail::ascii_lower(detail::trim(entry)));
    Vote vote = static_cast<Vote>(polarity);
    return {std::move(name), [field = std::move(field), folded, vote](const Record& record) -> Vote {
                const std::string* value = detail::text_field(record, field);
                if (!value) return kVoteAbstain;
                std::string key = detail::ascii_lower(detail::trim(*value));
                if (key.empty()) return kVoteAbstain;
                return folded->count(key) ? vote : kVoteAbstain;
            }};
}

}  // namespace labelkit
