#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "labelkit/errors.hpp"
#include "labelkit/rng.hpp"

namespace labelkit {

// A labeling-function vote: -1 (negative), 0 (abstain), +1 (positive).
// Stored as a signed byte so large matrices stay compact and row scans
// stay cache friendly.
using Vote = std::int8_t;

inline constexpr Vote kVoteNegative = -1;
inline constexpr Vote kVoteAbstain = 0;
inline constexpr Vote kVotePositive = 1;

inline constexpr bool is_valid_vote(int v) { return v == -1 || v == 0 || v == 1; }

// Dense m x n matrix of votes, row-major. Rows are examples, columns are
// labeling functions; both carry unique names.
struct LabelMatrix {
    std::vector<std::string> example_ids;
    std::vector<std::string> lf_names;
    std::vector<Vote> votes;  // row-major, size rows() * cols()

    std::size_t rows() const { return example_ids.size(); }
    std::size_t cols() const { return lf_names.size(); }

    Vote at(std::size_t i, std::size_t j) const { return votes[i * cols() + j]; }
    Vote& at(std::size_t i, std::size_t j) { return votes[i * cols() + j]; }

    std::span<const Vote> row(std::size_t i) const {
        return {votes.data() + i * cols(), cols()};
    }
};

// Per-LF log-space parameters of the generative label model plus the fixed
// class prior. alpha drives accuracy-given-non-abstain, beta drives the
// propensity to not abstain.
struct LabelModelParams {
    std::vector<double> alpha;
    std::vector<double> beta;
    double prior_pos = 0.5;

    std::size_t size() const { return alpha.size(); }
};

// Per-example posterior P(Y = +1 | votes), used as soft training targets.
struct ProbabilisticLabels {
    std::vector<std::string> example_ids;
    std::vector<double> p_pos;

    std::size_t size() const { return example_ids.size(); }
};

// Ground-truth labels in {-1, +1}; only the synthetic generator and the
// evaluation harness ever see these.
struct GoldLabels {
    std::vector<std::string> example_ids;
    std::vector<std::int8_t> y;

    std::size_t size() const { return example_ids.size(); }
};

// A record field value is either raw text or a decimal number.
using FieldValue = std::variant<std::string, double>;

inline bool is_numeric(const FieldValue& v) { return std::holds_alternative<double>(v); }

// One data point: a keyed bag of named fields split into the view visible
// to labeling functions (lf_fields) and the view the discriminative model
// is allowed to serve on (servable_fields). The key sets are disjoint.
struct Record {
    std::string example_id;
    std::map<std::string, FieldValue> lf_fields;
    std::map<std::string, FieldValue> servable_fields;
};

// --- validation ------------------------------------------------------------

namespace detail {

// Exact duplicate scan: hashes ids and only compares strings on hash hits,
// so it stays cheap at millions of rows.
inline void check_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
    seen.reserve(ids.size() * 2);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto& slots = seen[fnv1a64(ids[i])];
        for (std::size_t prev : slots) {
            if (ids[prev] == ids[i]) {
                throw DuplicateIdError(std::string(what) + " '" + ids[i] + "' repeated (positions " +
                                       std::to_string(prev) + " and " + std::to_string(i) + ")");
            }
        }
        slots.push_back(i);
    }
}

}  // namespace detail

inline void validate_label_matrix(const LabelMatrix& matrix) {
    if (matrix.votes.size() != matrix.rows() * matrix.cols()) {
        throw ShapeMismatchError("vote buffer holds " + std::to_string(matrix.votes.size()) +
                                 " cells, expected " + std::to_string(matrix.rows()) + " x " +
                                 std::to_string(matrix.cols()));
    }
    detail::check_unique(matrix.example_ids, "example_id");
    detail::check_unique(matrix.lf_names, "lf_name");
    const std::size_t n = matrix.cols();
    for (std::size_t k = 0; k < matrix.votes.size(); ++k) {
        if (!is_valid_vote(matrix.votes[k])) {
            throw BadVoteValueError("vote " + std::to_string(int(matrix.votes[k])) + " at row '" +
                                    matrix.example_ids[k / n] + "', column '" + matrix.lf_names[k % n] +
                                    "' is not in {-1, 0, 1}");
        }
    }
}

inline void validate_params(const LabelModelParams& params) {
    if (params.alpha.size() != params.beta.size()) {
        throw ShapeMismatchError("alpha has " + std::to_string(params.alpha.size()) + " entries, beta has " +
                                 std::to_string(params.beta.size()));
    }
    if (!(params.prior_pos > 0.0 && params.prior_pos < 1.0)) {
        throw ShapeMismatchError("prior_pos must lie strictly inside (0, 1)");
    }
    for (std::size_t j = 0; j < params.alpha.size(); ++j) {
        if (!std::isfinite(params.alpha[j]) || !std::isfinite(params.beta[j])) {
            throw ShapeMismatchError("non-finite parameter at column " + std::to_string(j));
        }
    }
}

inline void validate_labels(const ProbabilisticLabels& labels) {
    if (labels.example_ids.size() != labels.p_pos.size()) {
        throw ShapeMismatchError("labels carry " + std::to_string(labels.example_ids.size()) + " ids but " +
                                 std::to_string(labels.p_pos.size()) + " probabilities");
    }
    detail::check_unique(labels.example_ids, "example_id");
    for (std::size_t i = 0; i < labels.p_pos.size(); ++i) {
        if (!(labels.p_pos[i] >= 0.0 && labels.p_pos[i] <= 1.0)) {
            throw ShapeMismatchError("p_pos for '" + labels.example_ids[i] + "' is outside [0, 1]");
        }
    }
}

inline void validate_gold(const GoldLabels& gold) {
    if (gold.example_ids.size() != gold.y.size()) {
        throw ShapeMismatchError("gold labels carry " + std::to_string(gold.example_ids.size()) +
                                 " ids but " + std::to_string(gold.y.size()) + " values");
    }
    detail::check_unique(gold.example_ids, "example_id");
    for (std::size_t i = 0; i < gold.y.size(); ++i) {
        if (gold.y[i] != -1 && gold.y[i] != 1) {
            throw BadVoteValueError("gold label for '" + gold.example_ids[i] + "' is not in {-1, 1}");
        }
    }
}

inline void validate_record(const Record& record) {
    if (record.example_id.empty()) {
        throw ShapeMismatchError("record has an empty example_id");
    }
    for (const auto& entry : record.lf_fields) {
        const std::string& name = entry.first;
        if (record.servable_fields.count(name) != 0) {
            throw ShapeMismatchError("record '" + record.example_id + "' declares field '" + name +
                                     "' as both lf-visible and servable");
        }
    }
}

}  // namespace labelkit
