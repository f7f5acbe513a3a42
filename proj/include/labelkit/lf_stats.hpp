#pragma once

#include <string>
#include <vector>

#include "labelkit/io.hpp"
#include "labelkit/labeling_function.hpp"
#include "labelkit/types.hpp"

namespace labelkit {

// Empirical per-LF and pairwise diagnostics over a label matrix. For LFs
// j, k: conflict(j,k) <= overlap(j,k) <= min(coverage(j), coverage(k)).
struct LfStats {
    std::vector<std::string> lf_names;
    std::vector<double> coverage;  // fraction of rows with a non-abstain vote
    std::vector<double> overlap;   // n x n, fraction where both are non-abstain
    std::vector<double> conflict;  // n x n, fraction with opposite non-abstain votes

    std::size_t size() const { return lf_names.size(); }
    double overlap_at(std::size_t j, std::size_t k) const { return overlap[j * size() + k]; }
    double conflict_at(std::size_t j, std::size_t k) const { return conflict[j * size() + k]; }
};

inline LfStats lf_stats(const LabelMatrix& matrix) {
    validate_label_matrix(matrix);
    const std::size_t m = matrix.rows();
    const std::size_t n = matrix.cols();

    LfStats stats;
    stats.lf_names = matrix.lf_names;
    std::vector<std::uint64_t> cover(n, 0);
    std::vector<std::uint64_t> both(n * n, 0);
    std::vector<std::uint64_t> opposed(n * n, 0);

    std::vector<std::size_t> active;
    active.reserve(n);
    for (std::size_t i = 0; i < m; ++i) {
        auto row = matrix.row(i);
        active.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] != kVoteAbstain) {
                ++cover[j];
                active.push_back(j);
            }
        }
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a; b < active.size(); ++b) {
                std::size_t j = active[a], k = active[b];
                ++both[j * n + k];
                if (row[j] != row[k]) ++opposed[j * n + k];
            }
        }
    }

    stats.coverage.resize(n);
    stats.overlap.assign(n * n, 0.0);
    stats.conflict.assign(n * n, 0.0);
    const double denom = m > 0 ? static_cast<double>(m) : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        stats.coverage[j] = cover[j] / denom;
        for (std::size_t k = j; k < n; ++k) {
            double ov = both[j * n + k] / denom;
            double cf = opposed[j * n + k] / denom;
            stats.overlap[j * n + k] = stats.overlap[k * n + j] = ov;
            stats.conflict[j * n + k] = stats.conflict[k * n + j] = cf;
        }
    }
    return stats;
}

// Tidy CSV: kind,lf_a,lf_b,value with coverage/fault rows per LF and
// overlap/conflict rows per unordered pair.
inline void write_lf_stats(const LfStats& stats, const FaultTally& tally, const std::string& path,
                           const std::string& comment = {}) {
    detail::FileWriter out(path);
    if (!comment.empty()) out.line("# " + comment);
    out.line("kind,lf_a,lf_b,value");
    const std::size_t n = stats.size();
    for (std::size_t j = 0; j < n; ++j) {
        out.line("coverage," + stats.lf_names[j] + ",," + detail::format_g17(stats.coverage[j]));
    }
    for (std::size_t j = 0; j < tally.lf_names.size(); ++j) {
        out.line("faults," + tally.lf_names[j] + ",," + std::to_string(tally.faults[j]));
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            out.line("overlap," + stats.lf_names[j] + "," + stats.lf_names[k] + "," +
                     detail::format_g17(stats.overlap_at(j, k)));
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            out.line("conflict," + stats.lf_names[j] + "," + stats.lf_names[k] + "," +
                     detail::format_g17(stats.conflict_at(j, k)));
        }
    }
    out.close();
}

}  // namespace labelkit
