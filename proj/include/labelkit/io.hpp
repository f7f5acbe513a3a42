#pragma once

// File formats. All files are UTF-8 with '\n' line endings. Writers may
// prepend provenance lines starting with '#'; readers skip them. Writers
// format floating-point values so that read(write(x)) == x bit-exactly.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "labelkit/errors.hpp"
#include "labelkit/types.hpp"

namespace labelkit {

namespace detail {

// 17 significant digits: enough to reproduce any double exactly.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Shortest representation that round-trips; used where compactness matters
// (record files) rather than a fixed digit count.
inline std::string format_shortest(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && !s.empty();
}

// A record field value is numeric iff it parses completely as a finite
// decimal number; anything else (including "inf"/"nan") stays text.
inline FieldValue classify_value(std::string_view s) {
    double d;
    if (parse_double(s, d) && std::isfinite(d)) return d;
    return std::string(s);
}

inline void split(std::string_view line, char sep, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

class LineReader {
public:
    explicit LineReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open '" + path + "' for reading");
    }

    // Returns false at end of file. Comment lines ('#') are skipped unless
    // requested; line_number() reports the physical line of the last result.
    bool next(std::string& line, bool skip_comments = true) {
        while (std::getline(in_, line)) {
            ++line_number_;
            if (skip_comments && !line.empty() && line[0] == '#') continue;
            return true;
        }
        return false;
    }

    std::size_t line_number() const { return line_number_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t line_number_ = 0;
};

class FileWriter {
public:
    explicit FileWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open '" + path + "' for writing");
    }

    void line(std::string_view s) {
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
        out_.put('\n');
    }

    void close() {
        out_.flush();
        if (!out_) throw IoError("write to '" + path_ + "' failed");
        out_.close();
    }

private:
    std::string path_;
    std::ofstream out_;
};

}  // namespace detail

// --- label matrix: example_id,<lf_1>,...,<lf_n> ------------------------------

inline void write_label_matrix(const LabelMatrix& matrix, const std::string& path,
                               const std::string& comment = {}) {
    validate_label_matrix(matrix);
    detail::FileWriter out(path);
    if (!comment.empty()) out.line("# " + comment);
    std::string line = "example_id";
    for (const auto& name : matrix.lf_names) {
        line += ',';
        line += name;
    }
    out.line(line);
    const std::size_t n = matrix.cols();
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        line = matrix.example_ids[i];
        for (std::size_t j = 0; j < n; ++j) {
            Vote v = matrix.votes[i * n + j];
            line += (v == -1) ? ",-1" : (v == 0 ? ",0" : ",1");
        }
        out.line(line);
    }
    out.close();
}

inline LabelMatrix read_label_matrix(const std::string& path) {
    detail::LineReader in(path);
    std::string line;
    if (!in.next(line)) throw ParseError(path, in.line_number(), "missing header line");

    LabelMatrix matrix;
    std::vector<std::string_view> cells;
    detail::split(line, ',', cells);
    if (cells.empty() || cells[0] != "example_id") {
        throw ParseError(path, in.line_number(), "header must start with 'example_id'");
    }
    for (std::size_t j = 1; j < cells.size(); ++j) {
        if (cells[j].empty()) throw ParseError(path, in.line_number(), "empty labeling-function name");
        matrix.lf_names.emplace_back(cells[j]);
    }
    const std::size_t n = matrix.lf_names.size();

    while (in.next(line)) {
        detail::split(line, ',', cells);
        if (cells.size() != n + 1) {
            throw ParseError(path, in.line_number(),
                             "expected " + std::to_string(n + 1) + " cells, found " + std::to_string(cells.size()));
        }
        if (cells[0].empty()) throw ParseError(path, in.line_number(), "empty example_id");
        matrix.example_ids.emplace_back(cells[0]);
        for (std::size_t j = 1; j <= n; ++j) {
            std::string_view c = cells[j];
            Vote v;
            if (c == "0") {
                v = 0;
            } else if (c == "1") {
                v = 1;
            } else if (c == "-1") {
                v = -1;
            } else {
                throw ParseError(path, in.line_number(), "vote '" + std::string(c) + "' is not -1, 0 or 1");
            }
            matrix.votes.push_back(v);
        }
    }
    validate_label_matrix(matrix);
    return matrix;
}

// --- probabilistic labels: example_id,p_pos ---------------------------------

inline void write_labels(const ProbabilisticLabels& labels, const std::string& path,
                         const std::string& comment = {}) {
    validate_labels(labels);
    detail::FileWriter out(path);
    if (!comment.empty()) out.line("# " + comment);
    out.line("example_id,p_pos");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.line(labels.example_ids[i] + "," + detail::format_g17(labels.p_pos[i]));
    }
    out.close();
}

inline ProbabilisticLabels read_labels(const std::string& path) {
    detail::LineReader in(path);
    std::string line;
    if (!in.next(line)) throw ParseError(path, in.line_number(), "missing header line");
    if (line != "example_id,p_pos") throw ParseError(path, in.line_number(), "expected header 'example_id,p_pos'");

    ProbabilisticLabels labels;
    std::vector<std::string_view> cells;
    while (in.next(line)) {
        detail::split(line, ',', cells);
        if (cells.size() != 2) throw ParseError(path, in.line_number(), "expected 2 cells");
        double p;
        if (!detail::parse_double(cells[1], p)) {
            throw ParseError(path, in.line_number(), "cannot parse probability '" + std::string(cells[1]) + "'");
        }
        labels.example_ids.emplace_back(cells[0]);
        labels.p_pos.push_back(p);
    }
    validate_labels(labels);
    return labels;
}

// --- gold labels: example_id,y ----------------------------------------------

inline void write_gold(const GoldLabels& gold, const std::string& path, const std::string& comment = {}) {
    validate_gold(gold);
    detail::FileWriter out(path);
    if (!comment.empty()) out.line("# " + comment);
    out.line("example_id,y");
    for (std::size_t i = 0; i < gold.size(); ++i) {
        out.line(gold.example_ids[i] + (gold.y[i] == 1 ? ",1" : ",-1"));
    }
    out.close();
}

inline GoldLabels read_gold(const std::string& path) {
    detail::LineReader in(path);
    std::string line;
    if (!in.next(line)) throw ParseError(path, in.line_number(), "missing header line");
    if (line != "example_id,y") throw ParseError(path, in.line_number(), "expected header 'example_id,y'");

    GoldLabels gold;
    std::vector<std::string_view> cells;
    while (in.next(line)) {
        detail::split(line, ',', cells);
        if (cells.size() != 2) throw ParseError(path, in.line_number(), "expected 2 cells");
        if (cells[1] == "1") {
            gold.y.push_back(1);
        } else if (cells[1] == "-1") {
            gold.y.push_back(-1);
        } else {
            throw ParseError(path, in.line_number(), "gold label '" + std::string(cells[1]) + "' is not -1 or 1");
        }
        gold.example_ids.emplace_back(cells[0]);
    }
    validate_gold(gold);
    return gold;
}

// --- records: example_id<TAB>lf.name=value<TAB>sv.name=value ... -------------

inline std::string format_record(const Record& record) {
    std::string line = record.example_id;
    auto append = [&line](const char* prefix, const std::map<std::string, FieldValue>& fields) {
        for (const auto& [name, value] : fields) {
            line += '\t';
            line += prefix;
            line += name;
            line += '=';
            if (is_numeric(value)) {
                line += detail::format_shortest(std::get<double>(value));
            } else {
                line += std::get<std::string>(value);
            }
        }
    };
    append("lf.", record.lf_fields);
    append("sv.", record.servable_fields);
    return line;
}

inline Record parse_record(std::string_view line, const std::string& path, std::size_t line_number) {
    std::vector<std::string_view> cells;
    detail::split(line, '\t', cells);
    if (cells.empty() || cells[0].empty()) throw ParseError(path, line_number, "empty example_id");

    Record record;
    record.example_id = std::string(cells[0]);
    for (std::size_t k = 1; k < cells.size(); ++k) {
        std::string_view cell = cells[k];
        std::size_t eq = cell.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(path, line_number, "field '" + std::string(cell) + "' has no '='");
        }
        std::string_view name = cell.substr(0, eq);
        std::string_view value = cell.substr(eq + 1);
        std::map<std::string, FieldValue>* target = nullptr;
        if (name.substr(0, 3) == "lf.") {
            target = &record.lf_fields;
        } else if (name.substr(0, 3) == "sv.") {
            target = &record.servable_fields;
        } else {
            throw ParseError(path, line_number, "field '" + std::string(name) + "' lacks an lf./sv. prefix");
        }
        std::string bare(name.substr(3));
        if (bare.empty()) throw ParseError(path, line_number, "empty field name");
        if (record.lf_fields.count(bare) || record.servable_fields.count(bare)) {
            throw ParseError(path, line_number, "field '" + bare + "' declared twice");
        }
        target->emplace(std::move(bare), detail::classify_value(value));
    }
    return record;
}

// Streaming reader so multi-million-record files never need to be resident.
class RecordReader {
public:
    explicit RecordReader(const std::string& path) : in_(path) {}

    std::optional<Record> next() {
        std::string line;
        if (!in_.next(line)) return std::nullopt;
        return parse_record(line, in_.path(), in_.line_number());
    }

private:
    detail::LineReader in_;
};

inline void write_records(const std::vector<Record>& records, const std::string& path,
                          const std::string& comment = {}) {
    detail::FileWriter out(path);
    if (!comment.empty()) out.line("# " + comment);
    for (const auto& record : records) {
        validate_record(record);
        out.line(format_record(record));
    }
    out.close();
}

inline std::vector<Record> read_records(const std::string& path) {
    RecordReader reader(path);
    std::vector<Record> records;
    while (auto record = reader.next()) records.push_back(std::move(*record));
    return records;
}

// --- label model params: lf_name,alpha,beta ----------------------------------
// The leading comment line carries prior_pos (and optionally a config digest).

inline void write_label_model_params(const LabelModelParams& params, const std::vector<std::string>& lf_names,
                                     const std::string& path, const std::string& extra_comment = {}) {
    validate_params(params);
    if (lf_names.size() != params.size()) {
        throw ShapeMismatchError("params cover " + std::to_string(params.size()) + " LFs but " +
                                 std::to_string(lf_names.size()) + " names were given");
    }
    detail::FileWriter out(path);
    std::string comment = "# prior_pos=" + detail::format_g17(params.prior_pos);
    if (!extra_comment.empty()) comment += " " + extra_comment;
    out.line(comment);
    out.line("lf_name,alpha,beta");
    for (std::size_t j = 0; j < lf_names.size(); ++j) {
        out.line(lf_names[j] + "," + detail::format_g17(params.alpha[j]) + "," +
                 detail::format_g17(params.beta[j]));
    }
    out.close();
}

inline std::pair<LabelModelParams, std::vector<std::string>> read_label_model_params(const std::string& path) {
    detail::LineReader in(path);
    std::string line;
    LabelModelParams params;
    bool have_prior = false;

    // prior_pos travels in the comment header.
    while (in.next(line, /*skip_comments=*/false)) {
        if (line.empty() || line[0] != '#') break;
        std::istringstream tokens(line.substr(1));
        std::string token;
        while (tokens >> token) {
            if (token.rfind("prior_pos=", 0) == 0) {
                double p;
                if (!detail::parse_double(token.substr(10), p)) {
                    throw ParseError(path, in.line_number(), "cannot parse prior_pos");
                }
                params.prior_pos = p;
                have_prior = true;
            }
        }
    }
    if (!have_prior) throw ParseError(path, in.line_number(), "missing '# prior_pos=...' header comment");
    if (line != "lf_name,alpha,beta") {
        throw ParseError(path, in.line_number(), "expected header 'lf_name,alpha,beta'");
    }

    std::vector<std::string> lf_names;
    std::vector<std::string_view> cells;
    while (in.next(line)) {
        detail::split(line, ',', cells);
        if (cells.size() != 3) throw ParseError(path, in.line_number(), "expected 3 cells");
        double a, b;
        if (!detail::parse_double(cells[1], a) || !detail::parse_double(cells[2], b)) {
            throw ParseError(path, in.line_number(), "cannot parse alpha/beta");
        }
        lf_names.emplace_back(cells[0]);
        params.alpha.push_back(a);
        params.beta.push_back(b);
    }
    validate_params(params);
    detail::check_unique(lf_names, "lf_name");
    return {std::move(params), std::move(lf_names)};
}

// --- learned accuracies: lf_name,accuracy,propensity --------------------------

inline void write_accuracies(const std::vector<std::string>& lf_names, const std::vector<double>& accuracy,
                             const std::vector<double>& propensity, const std::string& path,
                             const std::string& comment = {}) {
    if (lf_names.size() != accuracy.size() || lf_names.size() != propensity.size()) {
        throw ShapeMismatchError("accuracy table columns disagree in length");
    }
    detail::FileWriter out(path);
    if (!comment.empty()) out.line("# " + comment);
    out.line("lf_name,accuracy,propensity");
    for (std::size_t j = 0; j < lf_names.size(); ++j) {
        out.line(lf_names[j] + "," + detail::format_g17(accuracy[j]) + "," + detail::format_g17(propensity[j]));
    }
    out.close();
}

}  // namespace labelkit
