#pragma once

// Per-domain text samples: documents grouped by domain through an external
// sort, reduced to the three longest and three shortest, merged with their
// fetch times. Domains without documents can be filled from a homepage
// fetcher.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "credigraph/binary_io.hpp"
#include "credigraph/external_sort.hpp"
#include "credigraph/extract.hpp"
#include "credigraph/url.hpp"

namespace credigraph {

inline constexpr std::size_t kDefaultMergedTextLimit = 32768;
inline constexpr std::size_t kKeepLongest = 3;
inline constexpr std::size_t kKeepShortest = 3;

struct KeptDocument {
    std::string url;
    Timestamp fetch_time{};
    std::string text;
    std::size_t text_length = 0;
};

struct DomainTextBundle {
    NodeKey node;
    std::vector<KeptDocument> documents_kept;  // merge order
    std::string merged_text;
    std::uint64_t total_documents_seen = 0;
    std::size_t truncation_limit = kDefaultMergedTextLimit;
};

// Streaming selector for the representative sample. Documents are ranked by
// length descending, then URL, fetch time and text ascending; the first three
// and the last three of that ranking are kept (each document once).
class RepresentativeSampler {
   public:
    void add(KeptDocument doc);
    [[nodiscard]] std::uint64_t seen() const noexcept { return seen_; }
    // Longest first (descending), then the shortest in ascending length.
    [[nodiscard]] std::vector<KeptDocument> kept() const;

   private:
    struct Ranked {
        KeptDocument doc;
        std::uint64_t seq;
    };
    static bool before(const Ranked& a, const Ranked& b);
    std::vector<Ranked> head_;  // best kKeepLongest in rank order
    std::vector<Ranked> tail_;  // worst kKeepShortest in rank order
    std::uint64_t seen_ = 0;
};

// "[<fetch_time>] <text>" blocks separated by blank lines, cut to `limit`
// scalar values.
std::string merge_documents(const std::vector<KeptDocument>& kept, std::size_t limit);

DomainTextBundle sample_representative(const NodeKey& node, const std::vector<KeptDocument>& group,
                                       std::size_t limit = kDefaultMergedTextLimit);

// Disk-backed group-by-domain.
class DocumentGrouper {
   public:
    explicit DocumentGrouper(std::filesystem::path scratch, SortOptions options = {});
    ~DocumentGrouper();

    // Returns false (and counts a skip) if the URL has no valid domain.
    bool add(const WetDocument& doc);
    [[nodiscard]] std::uint64_t skipped() const noexcept { return skipped_; }
    [[nodiscard]] std::uint64_t added() const noexcept { return added_; }

    // Streams one bundle per domain in key order. Single use.
    void for_each_bundle(std::size_t limit, const std::function<void(DomainTextBundle&&)>& sink);

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::uint64_t skipped_ = 0;
    std::uint64_t added_ = 0;
};

// Homepage text source for domains with no archived documents.
struct FetchOutcome {
    enum class Status { kOk, kAbsent, kTimeout, kError };
    Status status = Status::kAbsent;
    std::string url;
    Timestamp fetch_time{};
    std::string text;
    std::string error;
};

// Implementations must be callable from several threads at once and must
// bound each request by timeout().
class HomepageFetcher {
   public:
    virtual ~HomepageFetcher() = default;
    virtual FetchOutcome fetch(const NodeKey& domain) = 0;
    [[nodiscard]] virtual std::chrono::milliseconds timeout() const { return std::chrono::seconds(10); }
};

// Offline fetcher answering from a fixed map of reversed-host key -> text.
class StubFetcher final : public HomepageFetcher {
   public:
    explicit StubFetcher(std::map<std::string, std::string> pages, Timestamp fetch_time = {});
    // JSON object {"com.example": "homepage text", ...}.
    static StubFetcher from_json_file(const std::filesystem::path& path);
    FetchOutcome fetch(const NodeKey& domain) override;

   private:
    std::map<std::string, std::string> pages_;
    Timestamp fetch_time_;
};

struct FetchMiss {
    NodeKey node;
    FetchOutcome::Status status;
    std::string error;
};

struct FetchResult {
    std::vector<DomainTextBundle> bundles;
    std::vector<FetchMiss> misses;
};

struct FetchOptions {
    std::size_t max_in_flight = 8;
    std::size_t limit = kDefaultMergedTextLimit;
};

// Output order follows `domains`. Fetch failures are recorded, never thrown.
FetchResult fetch_missing(const std::vector<NodeKey>& domains, HomepageFetcher& fetcher,
                          const FetchOptions& options = {});

// Bundle store: `CGTXT1\0\0`, then per domain a u64 byte length followed by
// the key, u64 documents seen, u32 kept count, per kept document (url,
// fetch time, u64 text length), and the merged text. Strings are u32-length
// prefixed UTF-8.
inline constexpr io::Magic kTextMagic = io::make_magic("CGTXT1");

class BundleWriter {
   public:
    explicit BundleWriter(const std::filesystem::path& path);
    void write(const DomainTextBundle& bundle);
    void close();
    [[nodiscard]] std::uint64_t count() const noexcept { return count_; }

   private:
    std::ofstream out_;
    std::uint64_t count_ = 0;
};

// Records read back carry kept-document metadata; their `text` is empty.
class BundleReader final : public RecordSource<DomainTextBundle> {
   public:
    explicit BundleReader(const std::filesystem::path& path);
    std::optional<DomainTextBundle> next() override;

   private:
    std::ifstream in_;
    std::string file_;
};

void export_bundles_jsonl(const std::filesystem::path& store, const std::filesystem::path& jsonl);

}  // namespace credigraph
