#pragma once

// Snapshot manifests, the temporal sequence of snapshots, and
// month-over-month structural diffs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "credigraph/degree.hpp"
#include "credigraph/timeutil.hpp"

namespace credigraph {

// Snapshot timestamp: Monday of the ISO week in which the crawl began.
Date assign_timestamp(std::string_view crawl_id, Date crawl_start);
Date assign_timestamp(std::string_view crawl_id, std::string_view crawl_start);

struct SnapshotManifest {
    std::string snapshot_id;
    Date timestamp{};
    std::map<std::string, std::string> files;  // role -> path
    std::map<std::string, std::uint64_t> counts;
    std::map<std::string, std::string> format_versions;

    [[nodiscard]] nlohmann::json to_json() const;
    static SnapshotManifest from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static SnapshotManifest load(const std::filesystem::path& path);
};

struct TemporalGraph {
    std::vector<SnapshotManifest> snapshots;  // strictly increasing timestamps

    [[nodiscard]] std::size_t horizon() const noexcept { return snapshots.empty() ? 0 : snapshots.size() - 1; }
    [[nodiscard]] nlohmann::json to_json() const;
    void save(const std::filesystem::path& path) const;
    static TemporalGraph load(const std::filesystem::path& path);
};

class AssemblyError : public DataError {
   public:
    using DataError::DataError;
};

// Orders snapshots by timestamp. Throws AssemblyError on a duplicate id or
// two snapshots sharing a timestamp.
TemporalGraph build_temporal_graph(std::vector<SnapshotManifest> snapshots);

// Keys with their out-degrees, in any order.
struct SnapshotView {
    std::vector<std::string> keys;
    std::vector<std::uint32_t> out_degree;

    static SnapshotView load(const std::filesystem::path& dictionary, const std::filesystem::path& degrees);
};

struct SnapshotDiff {
    std::uint64_t overlap_nodes = 0;
    std::uint64_t new_nodes = 0;
    std::uint64_t vanished_nodes = 0;
    std::uint64_t increased = 0;
    std::uint64_t decreased = 0;
    // Undefined (nullopt) when there is no overlap.
    std::optional<double> out_degree_increased_fraction;
    std::optional<double> out_degree_decreased_fraction;

    [[nodiscard]] nlohmann::json to_json() const;
};

// Joins by key; ids of the two snapshots are unrelated.
SnapshotDiff snapshot_diff(const SnapshotView& prev, const SnapshotView& next);

}  // namespace credigraph
