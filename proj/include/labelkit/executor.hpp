#pragma once

// Deterministic parallel execution of labeling functions over a record
// stream. Records are read in order, split into contiguous chunks, labeled
// by a fixed-size worker pool, and reassembled in input order, so the
// resulting matrix is bit-identical for every parallelism level.

#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <queue>
#include <thread>
#include <unordered_map>
#include <vector>

#include "labelkit/io.hpp"
#include "labelkit/labeling_function.hpp"
#include "labelkit/types.hpp"

namespace labelkit {

class RecordStream {
public:
    virtual ~RecordStream() = default;
    virtual std::optional<Record> next() = 0;
};

class VectorRecordStream : public RecordStream {
public:
    explicit VectorRecordStream(const std::vector<Record>& records) : records_(records) {}

    std::optional<Record> next() override {
        if (pos_ >= records_.size()) return std::nullopt;
        return records_[pos_++];
    }

private:
    const std::vector<Record>& records_;
    std::size_t pos_ = 0;
};

class FileRecordStream : public RecordStream {
public:
    explicit FileRecordStream(const std::string& path) : reader_(path) {}

    std::optional<Record> next() override { return reader_.next(); }

private:
    RecordReader reader_;
};

namespace detail {

class WorkerPool {
public:
    explicit WorkerPool(std::size_t workers) {
        for (std::size_t i = 0; i < workers; ++i) {
            threads_.emplace_back([this] { run(); });
        }
    }

    ~WorkerPool() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    template <class F>
    auto submit(F f) -> std::future<decltype(f())> {
        using R = decltype(f());
        auto task = std::make_shared<std::packaged_task<R()>>(std::move(f));
        std::future<R> fut = task->get_future();
        {
            std::lock_guard<std::mutex> lock(mutex_);
            queue_.push([task] { (*task)(); });
        }
        cv_.notify_one();
        return fut;
    }

private:
    void run() {
        while (true) {
            std::function<void()> job;
            {
                std::unique_lock<std::mutex> lock(mutex_);
                cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
                if (queue_.empty()) {
                    if (stop_) return;
                    continue;
                }
                job = std::move(queue_.front());
                queue_.pop();
            }
            job();
        }
    }

    std::vector<std::thread> threads_;
    std::queue<std::function<void()>> queue_;
    std::mutex mutex_;
    std::condition_variable cv_;
    bool stop_ = false;
};

struct ChunkVotes {
    std::vector<std::string> ids;
    std::vector<Vote> votes;           // chunk rows x n
    std::vector<std::uint64_t> faults;  // per LF
};

}  // namespace detail

struct ApplyResult {
    LabelMatrix matrix;
    FaultTally tally;
};

inline constexpr std::size_t kDefaultChunkSize = 10000;

// Maps every labeling function over the stream. Row order equals stream
// order; column order equals `lfs` order. Throws DuplicateIdError on a
// repeated example_id; evaluator failures abstain and are tallied.
inline ApplyResult build_label_matrix(const std::vector<LabelingFunction>& lfs, RecordStream& records,
                                      std::size_t parallelism, std::size_t chunk_size = kDefaultChunkSize) {
    if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (chunk_size < 1) throw ConfigError("chunk_size must be >= 1");
    const std::size_t n = lfs.size();

    ApplyResult result;
    result.matrix.lf_names.reserve(n);
    for (const auto& lf : lfs) result.matrix.lf_names.push_back(lf.name);
    detail::check_unique(result.matrix.lf_names, "lf_name");
    result.tally.lf_names = result.matrix.lf_names;
    result.tally.faults.assign(n, 0);

    auto label_chunk = [&lfs, n](std::vector<Record> chunk) {
        detail::ChunkVotes out;
        out.ids.reserve(chunk.size());
        out.votes.reserve(chunk.size() * n);
        out.faults.assign(n, 0);
        for (const Record& record : chunk) {
            validate_record(record);
            out.ids.push_back(record.example_id);
            for (std::size_t j = 0; j < n; ++j) {
                out.votes.push_back(apply_lf(lfs[j], record, &out.faults[j]));
            }
        }
        return out;
    };

    // Exact duplicate detection: hash -> row indices, strings compared on
    // hash collision only.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen_ids;
    auto append_chunk = [&](detail::ChunkVotes&& chunk) {
        for (auto& id : chunk.ids) {
            auto& slots = seen_ids[fnv1a64(id)];
            std::size_t row = result.matrix.example_ids.size();
            for (std::size_t prev : slots) {
                if (result.matrix.example_ids[prev] == id) {
                    throw DuplicateIdError("example_id '" + id + "' repeated (rows " + std::to_string(prev) +
                                           " and " + std::to_string(row) + ")");
                }
            }
            slots.push_back(row);
            result.matrix.example_ids.push_back(std::move(id));
        }
        result.matrix.votes.insert(result.matrix.votes.end(), chunk.votes.begin(), chunk.votes.end());
        for (std::size_t j = 0; j < n; ++j) result.tally.faults[j] += chunk.faults[j];
    };

    detail::WorkerPool pool(parallelism);
    std::deque<std::future<detail::ChunkVotes>> in_flight;
    const std::size_t max_in_flight = parallelism * 2;

    bool done = false;
    while (!done) {
        std::vector<Record> chunk;
        chunk.reserve(chunk_size);
        while (chunk.size() < chunk_size) {
            auto record = records.next();
            if (!record) {
                done = true;
                break;
            }
            chunk.push_back(std::move(*record));
        }
        if (!chunk.empty()) {
            in_flight.push_back(pool.submit([chunk = std::move(chunk), &label_chunk]() mutable {
                return label_chunk(std::move(chunk));
            }));
        }
        // Futures are consumed front-first, which is chunk order.
        while (in_flight.size() > (done ? 0 : max_in_flight)) {
            append_chunk(in_flight.front().get());
            in_flight.pop_front();
        }
    }
    return result;
}

inline ApplyResult build_label_matrix(const std::vector<LabelingFunction>& lfs,
                                      const std::vector<Record>& records, std::size_t parallelism,
                                      std::size_t chunk_size = kDefaultChunkSize) {
    VectorRecordStream stream(records);
    return build_label_matrix(lfs, stream, parallelism, chunk_size);
}

}  // namespace labelkit
