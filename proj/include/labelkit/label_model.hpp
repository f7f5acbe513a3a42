#pragma once

// Sampling-free generative model of labeling-function accuracies.
//
// Each LF j carries log-space parameters (alpha_j, beta_j): alpha_j is the
// unnormalized log probability of voting correctly given a non-abstain,
// beta_j the unnormalized log probability of not abstaining. With
//   Z_j = log(exp(alpha_j + beta_j) + exp(-alpha_j + beta_j) + 1)
// the per-LF conditional on the true label y is
//   P(vote = y | y)  = exp( alpha_j + beta_j - Z_j)
//   P(vote = -y | y) = exp(-alpha_j + beta_j - Z_j)
//   P(vote = 0 | y)  = exp(-Z_j)
// and the model is fit by minimizing the exact negative marginal
// log-likelihood of the observed votes, -sum_i log sum_y P(row_i, y), with
// an analytic gradient. No sampling anywhere; everything stays in log space.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "labelkit/errors.hpp"
#include "labelkit/rng.hpp"
#include "labelkit/types.hpp"

namespace labelkit {

struct FitConfig {
    std::size_t batch_size = 64;
    std::size_t steps = 3000;
    double step_size = 0.01;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
    double init_alpha = 0.7;  // accuracy prior of ~0.80; breaks the sign symmetry
    double init_beta = 0.0;
    double prior_pos = 0.5;  // fixed class prior, never learned
};

struct FitReport {
    double final_nll = 0.0;  // mean per-row NLL over the whole matrix, unregularized
    double steps_per_second = 0.0;
    std::vector<std::pair<std::size_t, double>> nll_trace;  // (step, batch NLL)
};

struct NllGradient {
    std::vector<double> alpha;
    std::vector<double> beta;
};

struct LearnedAccuracies {
    std::vector<double> accuracy;    // P(correct | non-abstain) = sigmoid(2 alpha)
    std::vector<double> propensity;  // P(non-abstain) = 1 - exp(-Z)
};

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double logsumexp2(double a, double b) {
    double hi = a > b ? a : b;
    double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

// Z_j computed with the max factored out so huge parameters cannot overflow.
inline double log_partition(double alpha_j, double beta_j) {
    double a = alpha_j + beta_j;
    double b = -alpha_j + beta_j;
    double m = std::max(std::max(a, b), 0.0);
    return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(-m));
}

namespace detail {

// Per-LF log probabilities of (correct, incorrect, abstain) votes; shared
// by the likelihood, the gradient and the synthetic generator.
struct LfLogProbs {
    std::vector<double> cor;  //  alpha + beta - Z
    std::vector<double> inc;  // -alpha + beta - Z
    std::vector<double> abs;  // -Z
};

inline LfLogProbs lf_log_probs(const LabelModelParams& params) {
    const std::size_t n = params.size();
    LfLogProbs t;
    t.cor.resize(n);
    t.inc.resize(n);
    t.abs.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double z = log_partition(params.alpha[j], params.beta[j]);
        t.cor[j] = params.alpha[j] + params.beta[j] - z;
        t.inc[j] = -params.alpha[j] + params.beta[j] - z;
        t.abs[j] = -z;
    }
    return t;
}

inline void check_row_width(std::size_t row_len, const LabelModelParams& params) {
    if (row_len != params.size()) {
        throw ShapeMismatchError("row has " + std::to_string(row_len) + " votes but params cover " +
                                 std::to_string(params.size()) + " LFs");
    }
}

}  // namespace detail

// log P(row, Y = y): log prior(y) plus, per LF, the log probability of the
// observed vote under label y.
inline double log_joint_row(std::span<const Vote> row, int y, const LabelModelParams& params) {
    detail::check_row_width(row.size(), params);
    double acc = std::log(y == 1 ? params.prior_pos : 1.0 - params.prior_pos);
    for (std::size_t j = 0; j < row.size(); ++j) {
        double z = log_partition(params.alpha[j], params.beta[j]);
        if (row[j] == kVoteAbstain) {
            acc -= z;
        } else if (row[j] == y) {
            acc += params.alpha[j] + params.beta[j] - z;
        } else {
            acc += -params.alpha[j] + params.beta[j] - z;
        }
    }
    return acc;
}

// Negative marginal log-likelihood of a batch of rows:
//   -sum_i log( P(row_i, Y=+1) + P(row_i, Y=-1) )  +  l2 (|alpha|^2 + |beta|^2)
inline double negative_marginal_ll(const LabelMatrix& matrix, std::span<const std::size_t> rows,
                                   const LabelModelParams& params, double l2 = 0.0) {
    detail::check_row_width(matrix.cols(), params);
    const auto t = detail::lf_log_probs(params);
    const double log_prior_pos = std::log(params.prior_pos);
    const double log_prior_neg = std::log1p(-params.prior_pos);
    const std::size_t n = matrix.cols();

    double nll = 0.0;
    for (std::size_t i : rows) {
        const Vote* row = matrix.votes.data() + i * n;
        double g_pos = log_prior_pos;
        double g_neg = log_prior_neg;
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] == kVoteAbstain) {
                g_pos += t.abs[j];
                g_neg += t.abs[j];
            } else if (row[j] == kVotePositive) {
                g_pos += t.cor[j];
                g_neg += t.inc[j];
            } else {
                g_pos += t.inc[j];
                g_neg += t.cor[j];
            }
        }
        nll -= logsumexp2(g_pos, g_neg);
    }
    if (l2 > 0.0) {
        for (std::size_t j = 0; j < params.size(); ++j) {
            nll += l2 * (params.alpha[j] * params.alpha[j] + params.beta[j] * params.beta[j]);
        }
    }
    return nll;
}

inline double negative_marginal_ll(const LabelMatrix& matrix, const LabelModelParams& params, double l2 = 0.0) {
    std::vector<std::size_t> all(matrix.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return negative_marginal_ll(matrix, all, params, l2);
}

// Posterior P(Y = +1 | row). beta and Z cancel in the posterior odds, which
// collapse to 2 * sum_j alpha_j * vote_j plus the prior log-odds.
inline double posterior(std::span<const Vote> row, const LabelModelParams& params) {
    detail::check_row_width(row.size(), params);
    double log_odds = logit(params.prior_pos);
    for (std::size_t j = 0; j < row.size(); ++j) {
        log_odds += 2.0 * params.alpha[j] * row[j];
    }
    return sigmoid(log_odds);
}

// Same posterior through the un-collapsed route (normalizing the two
// joints); the closed form above must agree with this to ~1e-12.
inline double posterior_via_joints(std::span<const Vote> row, const LabelModelParams& params) {
    double g_pos = log_joint_row(row, +1, params);
    double g_neg = log_joint_row(row, -1, params);
    return std::exp(g_pos - logsumexp2(g_pos, g_neg));
}

// Analytic gradient of negative_marginal_ll over (alpha, beta). With
// q_i = P(Y=+1 | row_i) and (za, zb) = (dZ/dalpha, dZ/dbeta):
//   d/dalpha_j = sum_i [ za_j - vote_ij (2 q_i - 1) ] + 2 l2 alpha_j
//   d/dbeta_j  = sum_i [ zb_j - 1[vote_ij != 0]    ] + 2 l2 beta_j
inline NllGradient nll_gradient(const LabelMatrix& matrix, std::span<const std::size_t> rows,
                                const LabelModelParams& params, double l2 = 0.0) {
    detail::check_row_width(matrix.cols(), params);
    const std::size_t n = matrix.cols();
    const auto t = detail::lf_log_probs(params);

    std::vector<double> za(n), zb(n);
    for (std::size_t j = 0; j < n; ++j) {
        double p_cor = std::exp(t.cor[j]);
        double p_inc = std::exp(t.inc[j]);
        za[j] = p_cor - p_inc;
        zb[j] = p_cor + p_inc;
    }

    NllGradient grad;
    grad.alpha.assign(n, 0.0);
    grad.beta.assign(n, 0.0);
    const double prior_term = logit(params.prior_pos);
    for (std::size_t i : rows) {
        const Vote* row = matrix.votes.data() + i * n;
        double log_odds = prior_term;
        for (std::size_t j = 0; j < n; ++j) log_odds += 2.0 * params.alpha[j] * row[j];
        const double vote_weight = 2.0 * sigmoid(log_odds) - 1.0;  // 2q - 1
        for (std::size_t j = 0; j < n; ++j) {
            grad.alpha[j] += za[j] - row[j] * vote_weight;
            grad.beta[j] += zb[j] - (row[j] != kVoteAbstain ? 1.0 : 0.0);
        }
    }
    if (l2 > 0.0) {
        for (std::size_t j = 0; j < n; ++j) {
            grad.alpha[j] += 2.0 * l2 * params.alpha[j];
            grad.beta[j] += 2.0 * l2 * params.beta[j];
        }
    }
    return grad;
}

// Mini-batch marginal maximum likelihood with Adam. Batches are sampled
// uniformly with replacement through a counter-based generator, so the whole
// run is a pure function of (matrix, config).
inline std::pair<LabelModelParams, FitReport> fit(const LabelMatrix& matrix, const FitConfig& config) {
    validate_label_matrix(matrix);
    const std::size_t m = matrix.rows();
    const std::size_t n = matrix.cols();
    if (m == 0 || n == 0) throw DegenerateMatrixError("matrix is empty, nothing to fit");
    if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(config.step_size > 0.0)) throw ConfigError("step_size must be > 0");

    bool any_vote = false;
    for (Vote v : matrix.votes) {
        if (v != kVoteAbstain) {
            any_vote = true;
            break;
        }
    }
    if (!any_vote) throw DegenerateMatrixError("every vote abstains, nothing to learn");

    LabelModelParams params;
    params.alpha.assign(n, config.init_alpha);
    params.beta.assign(n, config.init_beta);
    params.prior_pos = config.prior_pos;

    // Adam state over the concatenated (alpha, beta) vector.
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    std::vector<double> m1(2 * n, 0.0), m2(2 * n, 0.0);

    FitReport report;
    const std::size_t trace_stride = std::max<std::size_t>(1, config.steps / 100);
    CounterRng rng(config.seed);
    std::vector<std::size_t> batch(config.batch_size);

    const auto start = std::chrono::steady_clock::now();
    for (std::size_t step = 1; step <= config.steps; ++step) {
        for (std::size_t k = 0; k < config.batch_size; ++k) {
            batch[k] = rng.below(0, (step - 1) * config.batch_size + k, m);
        }
        NllGradient grad = nll_gradient(matrix, batch, params, config.l2);

        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        for (std::size_t k = 0; k < 2 * n; ++k) {
            double g = k < n ? grad.alpha[k] : grad.beta[k - n];
            m1[k] = kBeta1 * m1[k] + (1.0 - kBeta1) * g;
            m2[k] = kBeta2 * m2[k] + (1.0 - kBeta2) * g * g;
            double update = config.step_size * (m1[k] / bc1) / (std::sqrt(m2[k] / bc2) + kEps);
            if (k < n) {
                params.alpha[k] -= update;
            } else {
                params.beta[k - n] -= update;
            }
        }

        if (step % trace_stride == 0 || step == config.steps) {
            report.nll_trace.emplace_back(step, negative_marginal_ll(matrix, batch, params, config.l2));
        }
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.steps_per_second = static_cast<double>(config.steps) / std::max(elapsed, 1e-9);
    report.final_nll = negative_marginal_ll(matrix, params) / static_cast<double>(m);
    return {std::move(params), std::move(report)};
}

inline ProbabilisticLabels predict_labels(const LabelMatrix& matrix, const LabelModelParams& params) {
    detail::check_row_width(matrix.cols(), params);
    ProbabilisticLabels labels;
    labels.example_ids = matrix.example_ids;
    labels.p_pos.reserve(matrix.rows());
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        labels.p_pos.push_back(posterior(matrix.row(i), params));
    }
    return labels;
}

inline LearnedAccuracies learned_accuracies(const LabelModelParams& params) {
    LearnedAccuracies out;
    out.accuracy.reserve(params.size());
    out.propensity.reserve(params.size());
    for (std::size_t j = 0; j < params.size(); ++j) {
        out.accuracy.push_back(sigmoid(2.0 * params.alpha[j]));
        out.propensity.push_back(1.0 - std::exp(-log_partition(params.alpha[j], params.beta[j])));
    }
    return out;
}

// Baseline: unweighted average of the non-abstaining votes, rescaled to a
// probability; rows where every LF abstains get 0.5.
inline ProbabilisticLabels equal_weight_labels(const LabelMatrix& matrix) {
    validate_label_matrix(matrix);
    ProbabilisticLabels labels;
    labels.example_ids = matrix.example_ids;
    labels.p_pos.reserve(matrix.rows());
    const std::size_t n = matrix.cols();
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        const Vote* row = matrix.votes.data() + i * n;
        double sum = 0.0;
        std::size_t active = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] != kVoteAbstain) {
                sum += row[j];
                ++active;
            }
        }
        labels.p_pos.push_back(active == 0 ? 0.5 : (1.0 + sum / static_cast<double>(active)) / 2.0);
    }
    return labels;
}

// Baseline: positive iff any LF votes positive; no positive evidence means
// a hard negative.
inline ProbabilisticLabels logical_or_labels(const LabelMatrix& matrix) {
    validate_label_matrix(matrix);
    ProbabilisticLabels labels;
    labels.example_ids = matrix.example_ids;
    labels.p_pos.reserve(matrix.rows());
    const std::size_t n = matrix.cols();
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        const Vote* row = matrix.votes.data() + i * n;
        bool any_pos = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] == kVotePositive) {
                any_pos = true;
                break;
            }
        }
        labels.p_pos.push_back(any_pos ? 1.0 : 0.0);
    }
    return labels;
}

}  // namespace labelkit
