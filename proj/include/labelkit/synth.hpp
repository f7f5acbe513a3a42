#pragma once

// Synthetic benchmark generator. Draws (Y, votes) from the exact generative
// process the label model assumes, and builds records whose lf-visible
// fields encode the votes (so template LFs can reproduce them) plus two
// numeric servable fields with tunable predictive signal. Every row is a
// pure function of (config, row index), so generation can shard freely.
//
// Also holds the probability-space brute-force likelihood oracles used by
// the tests; these deliberately avoid the log-space code paths they check.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "labelkit/errors.hpp"
#include "labelkit/label_model.hpp"
#include "labelkit/rng.hpp"
#include "labelkit/types.hpp"

namespace labelkit {

struct SynthConfig {
    std::size_t m = 0;
    LabelModelParams params;  // true parameters
    std::uint64_t seed = 0;
    double servable_signal = 1.0;  // in [0,1]: how predictive sv.signal is of Y
    std::vector<std::string> lf_names;  // optional; defaults to lf01, lf02, ...
};

struct SynthData {
    GoldLabels gold;
    LabelMatrix matrix;
    std::vector<Record> records;
};

struct SynthRow {
    std::string example_id;
    std::int8_t y = 1;
    std::vector<Vote> votes;
    Record record;
};

namespace detail {

inline std::vector<std::string> synth_lf_names(const SynthConfig& config) {
    if (!config.lf_names.empty()) {
        if (config.lf_names.size() != config.params.size()) {
            throw ShapeMismatchError("lf_names and params disagree in length");
        }
        return config.lf_names;
    }
    std::vector<std::string> names;
    names.reserve(config.params.size());
    for (std::size_t j = 0; j < config.params.size(); ++j) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "lf%02zu", j + 1);
        names.emplace_back(buf);
    }
    return names;
}

inline double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

// RNG streams used by the generator; one substream per purpose keeps draws
// independent and shard-safe.
enum SynthStream : std::uint64_t {
    kStreamLabel = 1,
    kStreamVote = 2,
    kStreamScore = 3,
    kStreamSignal = 4,
    kStreamNoise = 5,
};

}  // namespace detail

// Deterministically generates row i of the synthetic dataset. Vote
// probabilities are (e^{a+b}, e^{-a+b}, 1) / e^{Z} for (correct, incorrect,
// abstain). The record carries, per LF, a text tag ("pos"/"neg", absent on
// abstain) and a numeric score ([0.8,1] for +1, [0.35,0.65] for 0, [0,0.2]
// for -1) so keyword/pattern/lookup and threshold templates can all see the
// vote; servable fields are sv.signal = y*signal + N(0,1) and pure-noise
// sv.noise.
inline SynthRow generate_row(const SynthConfig& config, const std::vector<std::string>& lf_names,
                             std::size_t i) {
    const std::size_t n = config.params.size();
    const CounterRng rng(config.seed);

    SynthRow row;
    char idbuf[24];
    std::snprintf(idbuf, sizeof(idbuf), "e%08zu", i);
    row.example_id = idbuf;
    row.record.example_id = row.example_id;

    row.y = rng.uniform(detail::kStreamLabel, i) < config.params.prior_pos ? 1 : -1;

    const auto t = detail::lf_log_probs(config.params);
    row.votes.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double p_cor = std::exp(t.cor[j]);
        double p_inc = std::exp(t.inc[j]);
        double u = rng.uniform(detail::kStreamVote, i * n + j);
        Vote v;
        if (u < p_cor) {
            v = row.y;
        } else if (u < p_cor + p_inc) {
            v = static_cast<Vote>(-row.y);
        } else {
            v = kVoteAbstain;
        }
        row.votes[j] = v;

        double jitter = rng.uniform(detail::kStreamScore, i * n + j);
        double score;
        if (v == kVotePositive) {
            score = 0.8 + 0.2 * jitter;
            row.record.lf_fields.emplace("tag_" + lf_names[j], std::string("pos"));
        } else if (v == kVoteNegative) {
            score = 0.2 * jitter;
            row.record.lf_fields.emplace("tag_" + lf_names[j], std::string("neg"));
        } else {
            score = 0.35 + 0.3 * jitter;
        }
        row.record.lf_fields.emplace("score_" + lf_names[j], detail::round4(score));
    }

    row.record.servable_fields.emplace(
        "signal", detail::round4(row.y * config.servable_signal + rng.gaussian(detail::kStreamSignal, i)));
    row.record.servable_fields.emplace("noise", detail::round4(rng.gaussian(detail::kStreamNoise, i)));
    return row;
}

inline SynthData generate(const SynthConfig& config) {
    validate_params(config.params);
    const auto lf_names = detail::synth_lf_names(config);
    const std::size_t n = config.params.size();

    SynthData data;
    data.matrix.lf_names = lf_names;
    data.matrix.example_ids.reserve(config.m);
    data.matrix.votes.reserve(config.m * n);
    data.gold.example_ids.reserve(config.m);
    data.gold.y.reserve(config.m);
    data.records.reserve(config.m);

    for (std::size_t i = 0; i < config.m; ++i) {
        SynthRow row = generate_row(config, lf_names, i);
        data.matrix.example_ids.push_back(row.example_id);
        data.matrix.votes.insert(data.matrix.votes.end(), row.votes.begin(), row.votes.end());
        data.gold.example_ids.push_back(row.example_id);
        data.gold.y.push_back(row.y);
        data.records.push_back(std::move(row.record));
    }
    return data;
}

// --- brute-force oracles (probability space, n <= 20) ------------------------

namespace detail {

inline void check_oracle_width(std::size_t n) {
    if (n > 20) throw ShapeMismatchError("brute-force oracle supports at most 20 LFs");
}

inline double vote_prob_given_y(double alpha, double beta, Vote v, int y) {
    double denom = std::exp(alpha + beta) + std::exp(-alpha + beta) + 1.0;
    if (v == kVoteAbstain) return 1.0 / denom;
    if (v == y) return std::exp(alpha + beta) / denom;
    return std::exp(-alpha + beta) / denom;
}

inline double joint_prob(std::span<const Vote> row, int y, const LabelModelParams& params) {
    double p = y == 1 ? params.prior_pos : 1.0 - params.prior_pos;
    for (std::size_t j = 0; j < row.size(); ++j) {
        p *= vote_prob_given_y(params.alpha[j], params.beta[j], row[j], y);
    }
    return p;
}

}  // namespace detail

// P(votes = row), marginalizing the label out by explicit summation.
inline double brute_force_marginal(std::span<const Vote> row, const LabelModelParams& params) {
    detail::check_oracle_width(row.size());
    detail::check_row_width(row.size(), params);
    return detail::joint_prob(row, +1, params) + detail::joint_prob(row, -1, params);
}

// P(Y = +1 | votes = row) by normalizing the two explicit joints.
inline double brute_force_posterior(std::span<const Vote> row, const LabelModelParams& params) {
    detail::check_oracle_width(row.size());
    detail::check_row_width(row.size(), params);
    double jp = detail::joint_prob(row, +1, params);
    double jn = detail::joint_prob(row, -1, params);
    return jp / (jp + jn);
}

}  // namespace labelkit
