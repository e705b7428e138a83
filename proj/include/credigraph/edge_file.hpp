#pragma once

// CGEDGE1 edge lists and newline-separated node dictionaries.
//
// Edge file: `CGEDGE1\0`, u64 edge count, then count pairs of little-endian
// u64 (src, dst). Dictionary: a `#CGDICT1` line, then one reversed-host key
// per line; the key on line i + 2 has id i.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "credigraph/binary_io.hpp"
#include "credigraph/external_sort.hpp"
#include "credigraph/url.hpp"

namespace credigraph {

using NodeId = std::uint64_t;

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline constexpr io::Magic kEdgeMagic = io::make_magic("CGEDGE1");

class EdgeWriter {
   public:
    explicit EdgeWriter(const std::filesystem::path& path);
    ~EdgeWriter();
    EdgeWriter(const EdgeWriter&) = delete;
    EdgeWriter& operator=(const EdgeWriter&) = delete;

    void write(Edge e);
    // Patches the count into the header. Called by the destructor if needed.
    void close();
    [[nodiscard]] std::uint64_t count() const noexcept { return count_; }

   private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::uint64_t count_ = 0;
};

class EdgeReader {
   public:
    // Throws FormatError on a missing/bad header or a size that disagrees
    // with the declared count.
    explicit EdgeReader(const std::filesystem::path& path);

    [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
    // Byte offset of the edge that the next call to next() returns.
    [[nodiscard]] std::uint64_t offset() const noexcept { return 16 + 16 * read_; }

    std::optional<Edge> next();

   private:
    void refill();

    std::ifstream in_;
    std::uint64_t count_ = 0;
    std::uint64_t read_ = 0;
    std::vector<std::uint64_t> buffer_;
    std::size_t pos_ = 0;
};

std::vector<Edge> read_all_edges(const std::filesystem::path& path);
void write_edges(const std::filesystem::path& path, std::span<const Edge> edges);

inline constexpr std::string_view kDictionaryHeader = "#CGDICT1";

// Streams dictionary keys in id order. Throws FormatError if the header
// line is missing.
class DictionaryReader final : public RecordSource<std::string> {
   public:
    explicit DictionaryReader(const std::filesystem::path& path);
    std::optional<std::string> next() override;
    [[nodiscard]] NodeId position() const noexcept { return next_id_; }

   private:
    std::ifstream in_;
    NodeId next_id_ = 0;
};

// In-memory dictionary: sorted keys, id = index.
class NodeDictionary {
   public:
    NodeDictionary() = default;
    // Keys must be strictly increasing; throws FormatError otherwise.
    explicit NodeDictionary(std::vector<std::string> sorted_keys);

    static NodeDictionary load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    [[nodiscard]] std::size_t size() const noexcept { return keys_.size(); }
    [[nodiscard]] const std::string& key(NodeId id) const { return keys_.at(id); }
    [[nodiscard]] std::optional<NodeId> find(std::string_view key) const noexcept;
    [[nodiscard]] const std::vector<std::string>& keys() const noexcept { return keys_; }

   private:
    std::vector<std::string> keys_;
};

}  // namespace credigraph
