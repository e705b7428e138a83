#pragma once

// Disk-backed sorting and k-way merging.
//
// ExternalSorter buffers records up to a byte budget, spills each full buffer
// as a sorted run to a scratch file and merges the runs on finish(). Runs are
// merged in passes of at most `max_fan_in` files, so the number of open files
// and the heap size stay bounded regardless of input size.
//
// A Codec provides:
//   static void write(std::ostream&, const T&);
//   static bool read(std::istream&, T&);         // false at clean end of run
//   static std::size_t bytes(const T&);          // approximate resident size

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "credigraph/binary_io.hpp"
#include "credigraph/errors.hpp"

namespace credigraph {

// Creates (and on destruction removes) a unique directory under `root`.
class ScratchDir {
   public:
    explicit ScratchDir(const std::filesystem::path& root, std::string_view prefix = "cg");
    ~ScratchDir();
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    [[nodiscard]] std::filesystem::path next_file(std::string_view stem);

   private:
    std::filesystem::path path_;
    std::atomic<std::uint64_t> counter_{0};
};

// Scratch root: $CREDIGRAPH_SCRATCH if set, else the system temp directory.
std::filesystem::path default_scratch_root();

// Pull-based source: next() returns nullopt when exhausted.
template <class T>
class RecordSource {
   public:
    virtual ~RecordSource() = default;
    virtual std::optional<T> next() = 0;
};

template <class T>
class VectorSource final : public RecordSource<T> {
   public:
    explicit VectorSource(std::vector<T> items) : items_(std::move(items)) {}
    std::optional<T> next() override {
        if (pos_ >= items_.size()) {
            return std::nullopt;
        }
        return std::move(items_[pos_++]);
    }

   private:
    std::vector<T> items_;
    std::size_t pos_ = 0;
};

template <class T, class Codec>
class RunFileSource final : public RecordSource<T> {
   public:
    explicit RunFileSource(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) {
            throw IoError("cannot open run file `" + path.string() + "`");
        }
    }
    std::optional<T> next() override {
        T value;
        if (!Codec::read(in_, value)) {
            return std::nullopt;
        }
        return value;
    }

   private:
    std::ifstream in_;
};

// Merges sorted sources into one sorted stream. With `unique`, records equal
// to the previously emitted one are dropped.
template <class T, class Less = std::less<T>>
class KWayMerge final : public RecordSource<T> {
   public:
    KWayMerge(std::vector<std::unique_ptr<RecordSource<T>>> sources, bool unique, Less less = {})
        : sources_(std::move(sources)), unique_(unique), less_(less) {
        for (std::size_t i = 0; i < sources_.size(); ++i) {
            pull(i);
        }
    }

    std::optional<T> next() override {
        while (!heap_.empty()) {
            std::pop_heap(heap_.begin(), heap_.end(), HeapLess{&less_});
            Entry top = std::move(heap_.back());
            heap_.pop_back();
            pull(top.source);
            if (unique_ && last_ && !less_(*last_, top.value) && !less_(top.value, *last_)) {
                continue;
            }
            if (unique_) {
                last_ = top.value;
            }
            return std::move(top.value);
        }
        return std::nullopt;
    }

   private:
    struct Entry {
        T value;
        std::size_t source;
    };
    struct HeapLess {
        const Less* less;
        bool operator()(const Entry& a, const Entry& b) const {
            // Min-heap; ties resolved by source index for stable output.
            if ((*less)(b.value, a.value)) return true;
            if ((*less)(a.value, b.value)) return false;
            return a.source > b.source;
        }
    };

    void pull(std::size_t i) {
        if (auto v = sources_[i]->next()) {
            heap_.push_back(Entry{std::move(*v), i});
            std::push_heap(heap_.begin(), heap_.end(), HeapLess{&less_});
        }
    }

    std::vector<std::unique_ptr<RecordSource<T>>> sources_;
    bool unique_;
    Less less_;
    std::vector<Entry> heap_;
    std::optional<T> last_;
};

struct SortOptions {
    std::size_t memory_budget_bytes = std::size_t{256} << 20;
    std::size_t max_fan_in = 64;
    bool unique = false;
};

template <class T, class Codec, class Less = std::less<T>>
class ExternalSorter {
   public:
    ExternalSorter(std::filesystem::path scratch, SortOptions options = {}, Less less = {})
        : scratch_(std::move(scratch)), options_(options), less_(less) {
        if (options_.max_fan_in < 2) {
            throw ParameterError("external sort fan-in must be at least 2");
        }
        std::filesystem::create_directories(scratch_);
    }

    ExternalSorter(const ExternalSorter&) = delete;
    ExternalSorter& operator=(const ExternalSorter&) = delete;

    ~ExternalSorter() {
        std::error_code ec;
        for (const auto& run : runs_) {
            std::filesystem::remove(run, ec);
        }
    }

    void add(T value) {
        buffered_bytes_ += Codec::bytes(value);
        buffer_.push_back(std::move(value));
        ++count_;
        if (buffered_bytes_ >= options_.memory_budget_bytes) {
            spill();
        }
    }

    [[nodiscard]] std::size_t spilled_runs() const noexcept { return spilled_; }
    [[nodiscard]] std::uint64_t count() const noexcept { return count_; }

    // Sorted (and, with options.unique, deduplicated) stream of everything added.
    // The sorter must outlive the returned source.
    std::unique_ptr<RecordSource<T>> finish() {
        sort_buffer();
        if (runs_.empty()) {
            return std::make_unique<VectorSource<T>>(std::move(buffer_));
        }
        if (!buffer_.empty()) {
            spill();
        }
        while (runs_.size() > options_.max_fan_in) {
            merge_pass();
        }
        std::vector<std::unique_ptr<RecordSource<T>>> sources;
        for (const auto& run : runs_) {
            sources.push_back(std::make_unique<RunFileSource<T, Codec>>(run));
        }
        return std::make_unique<KWayMerge<T, Less>>(std::move(sources), options_.unique, less_);
    }

   private:
    void sort_buffer() {
        std::sort(buffer_.begin(), buffer_.end(), less_);
        if (options_.unique) {
            const auto eq = [this](const T& a, const T& b) { return !less_(a, b) && !less_(b, a); };
            buffer_.erase(std::unique(buffer_.begin(), buffer_.end(), eq), buffer_.end());
        }
    }

    std::filesystem::path next_run_path() {
        return scratch_ / ("run-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
                           std::to_string(run_counter_++) + ".bin");
    }

    void spill() {
        sort_buffer();
        const auto path = next_run_path();
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw IoError("cannot create run file `" + path.string() + "`");
            }
            for (const auto& v : buffer_) {
                Codec::write(out, v);
            }
            if (!out) {
                throw IoError("write failed on run file `" + path.string() + "`");
            }
        }
        runs_.push_back(path);
        buffer_.clear();
        buffer_.shrink_to_fit();
        buffered_bytes_ = 0;
        ++spilled_;
    }

    void merge_pass() {
        std::vector<std::filesystem::path> next;
        for (std::size_t i = 0; i < runs_.size(); i += options_.max_fan_in) {
            const std::size_t end = std::min(runs_.size(), i + options_.max_fan_in);
            std::vector<std::unique_ptr<RecordSource<T>>> sources;
            for (std::size_t j = i; j < end; ++j) {
                sources.push_back(std::make_unique<RunFileSource<T, Codec>>(runs_[j]));
            }
            KWayMerge<T, Less> merge(std::move(sources), options_.unique, less_);
            const auto path = next_run_path();
            {
                std::ofstream out(path, std::ios::binary | std::ios::trunc);
                if (!out) {
                    throw IoError("cannot create run file `" + path.string() + "`");
                }
                while (auto v = merge.next()) {
                    Codec::write(out, *v);
                }
            }
            std::error_code ec;
            for (std::size_t j = i; j < end; ++j) {
                std::filesystem::remove(runs_[j], ec);
            }
            next.push_back(path);
        }
        runs_ = std::move(next);
    }

    std::filesystem::path scratch_;
    SortOptions options_;
    Less less_;
    std::vector<T> buffer_;
    std::size_t buffered_bytes_ = 0;
    std::vector<std::filesystem::path> runs_;
    std::size_t spilled_ = 0;
    std::uint64_t run_counter_ = 0;
    std::uint64_t count_ = 0;
};

// Common codecs.

struct StringCodec {
    static void write(std::ostream& out, const std::string& s) { io::write_string(out, s); }
    static bool read(std::istream& in, std::string& s) { return io::try_read_string(in, s); }
    static std::size_t bytes(const std::string& s) { return s.size() + sizeof(std::string); }
};

using IdPair = std::pair<std::uint64_t, std::uint64_t>;

struct IdPairCodec {
    static void write(std::ostream& out, const IdPair& p) {
        io::write_le(out, p.first);
        io::write_le(out, p.second);
    }
    static bool read(std::istream& in, IdPair& p) {
        if (!io::try_read_le(in, p.first)) {
            return false;
        }
        if (!io::try_read_le(in, p.second)) {
            throw FormatError("truncated id pair in run file");
        }
        return true;
    }
    static std::size_t bytes(const IdPair&) { return sizeof(IdPair); }
};

using KeyIdPair = std::pair<std::string, std::uint64_t>;

struct KeyIdCodec {
    static void write(std::ostream& out, const KeyIdPair& p) {
        io::write_string(out, p.first);
        io::write_le(out, p.second);
    }
    static bool read(std::istream& in, KeyIdPair& p) {
        if (!io::try_read_string(in, p.first)) {
            return false;
        }
        p.second = io::read_le<std::uint64_t>(in, "run record");
        return true;
    }
    static std::size_t bytes(const KeyIdPair& p) { return p.first.size() + sizeof(KeyIdPair); }
};

}  // namespace credigraph
