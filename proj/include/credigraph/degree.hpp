#pragma once

// Disk-backed degree vectors and single-pass degree filtering.
//
// Degree file: `CGDEG1\0\0`, u64 n, n little-endian u32 in-degrees, then n
// u32 out-degrees. The arrays are memory-mapped, never loaded wholesale.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "credigraph/edge_file.hpp"

namespace credigraph {

inline constexpr io::Magic kDegreeMagic = io::make_magic("CGDEG1");

class MappedFile {
   public:
    MappedFile() = default;
    // Maps an existing file; `writable` maps it shared read-write.
    MappedFile(const std::filesystem::path& path, bool writable);
    ~MappedFile();
    MappedFile(MappedFile&& other) noexcept;
    MappedFile& operator=(MappedFile&& other) noexcept;
    MappedFile(const MappedFile&) = delete;
    MappedFile& operator=(const MappedFile&) = delete;

    [[nodiscard]] std::span<std::byte> bytes() const noexcept { return {data_, size_}; }
    [[nodiscard]] bool writable() const noexcept { return writable_; }

   private:
    void release() noexcept;
    std::byte* data_ = nullptr;
    std::size_t size_ = 0;
    bool writable_ = false;
};

class DegreeTable {
   public:
    // Creates a zeroed table of `n` nodes at `path`.
    static DegreeTable create(const std::filesystem::path& path, std::uint64_t n);
    static DegreeTable open(const std::filesystem::path& path);

    [[nodiscard]] std::uint64_t size() const noexcept { return n_; }
    [[nodiscard]] std::span<const std::uint32_t> in() const noexcept { return {in_, n_}; }
    [[nodiscard]] std::span<const std::uint32_t> out() const noexcept { return {out_, n_}; }
    // Total degree (in + out), widened so it cannot wrap.
    [[nodiscard]] std::uint64_t total(NodeId v) const noexcept {
        return static_cast<std::uint64_t>(in_[v]) + out_[v];
    }
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

    // Saturating increments; only valid on a table from create().
    void add_edge(NodeId src, NodeId dst) noexcept;

   private:
    DegreeTable(std::filesystem::path path, MappedFile map);
    std::filesystem::path path_;
    MappedFile map_;
    std::uint64_t n_ = 0;
    std::uint32_t* in_ = nullptr;
    std::uint32_t* out_ = nullptr;
};

// One sequential pass over `edges`. Throws CorruptInputError (with the byte
// offset of the bad pair) if an id is >= n.
DegreeTable compute_degrees(const std::filesystem::path& edges, std::uint64_t n,
                            const std::filesystem::path& degree_file);

enum class DegreeComparison { kGreater, kGreaterEqual };

// Survivor bitset with a per-word rank index: compact id = rank(raw id).
class SurvivorSet {
   public:
    explicit SurvivorSet(std::uint64_t n = 0);
    void set(NodeId v) noexcept { words_[v >> 6] |= std::uint64_t{1} << (v & 63); }
    [[nodiscard]] bool contains(NodeId v) const noexcept { return (words_[v >> 6] >> (v & 63)) & 1U; }
    // Must be called after the last set().
    void build_rank();
    [[nodiscard]] NodeId rank(NodeId v) const noexcept;
    [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
    [[nodiscard]] std::uint64_t universe() const noexcept { return n_; }

   private:
    std::uint64_t n_ = 0;
    std::vector<std::uint64_t> words_;
    std::vector<std::uint64_t> rank_;
    std::uint64_t count_ = 0;
};

struct FilterOutputs {
    std::filesystem::path edges;        // CGEDGE1, compact ids
    std::filesystem::path compact_map;  // `raw_id<TAB>compact_id` lines, optional
    std::filesystem::path dictionary_in;   // raw dictionary, optional
    std::filesystem::path dictionary_out;  // survivor keys, optional
};

struct FilteredGraph {
    SurvivorSet survivors;
    std::uint64_t edge_count = 0;
    std::int64_t threshold = 3;
    DegreeComparison comparison = DegreeComparison::kGreater;
    std::string source_snapshot;

    [[nodiscard]] std::uint64_t node_count() const noexcept { return survivors.count(); }
    [[nodiscard]] NodeId compact_id(NodeId raw) const noexcept { return survivors.rank(raw); }
};

// Keeps edge (u, v) iff both endpoints pass the threshold on the raw degrees.
// Survivors are every node that passes, including ones left isolated.
FilteredGraph filter_by_degree(const std::filesystem::path& edges, const DegreeTable& degrees,
                               std::int64_t threshold, const FilterOutputs& outputs,
                               DegreeComparison comparison = DegreeComparison::kGreater,
                               std::string source_snapshot = {});

[[nodiscard]] bool passes_threshold(std::uint64_t degree, std::int64_t threshold,
                                    DegreeComparison comparison) noexcept;

struct GraphCounts {
    std::uint64_t nodes = 0;
    std::uint64_t edges = 0;
};

struct RetentionReport {
    double edge_retention_pct = 0.0;
    double node_retention_pct = 0.0;

    // Two-decimal renderings, e.g. "90.21".
    [[nodiscard]] std::string edge_text() const;
    [[nodiscard]] std::string node_text() const;
};

// 100 * filtered / raw, rounded to two decimals. Throws DataError if a raw
// count is zero.
RetentionReport filter_report(GraphCounts raw, GraphCounts filtered);

}  // namespace credigraph
