#include "credigraph/temporal.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

namespace credigraph {

Date assign_timestamp(std::string_view /*crawl_id*/, Date crawl_start) { return iso_week_monday(crawl_start); }

Date assign_timestamp(std::string_view crawl_id, std::string_view crawl_start) {
    return assign_timestamp(crawl_id, parse_date(crawl_start.substr(0, std::min<std::size_t>(10, crawl_start.size()))));
}

nlohmann::json SnapshotManifest::to_json() const {
    return nlohmann::json{
        {"format", "CGSNAP1"},
        {"snapshot_id", snapshot_id},
        {"timestamp", format_date(timestamp)},
        {"files", files},
        {"counts", counts},
        {"format_versions", format_versions},
    };
}

SnapshotManifest SnapshotManifest::from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", "") != "CGSNAP1") {
        throw FormatError("not a CGSNAP1 snapshot manifest (bad or missing version header)");
    }
    SnapshotManifest m;
    m.snapshot_id = j.at("snapshot_id").get<std::string>();
    m.timestamp = parse_date(j.at("timestamp").get<std::string>());
    m.files = j.value("files", std::map<std::string, std::string>{});
    m.counts = j.value("counts", std::map<std::string, std::uint64_t>{});
    m.format_versions = j.value("format_versions", std::map<std::string, std::string>{});
    return m;
}

void SnapshotManifest::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot create `" + path.string() + "`");
    }
    out << to_json().dump(2) << '\n';
}

namespace {
nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open `" + path.string() + "`");
    }
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw FormatError("`" + path.string() + "` is not JSON");
    }
    return j;
}
}  // namespace

SnapshotManifest SnapshotManifest::load(const std::filesystem::path& path) { return from_json(read_json(path)); }

nlohmann::json TemporalGraph::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : snapshots) {
        arr.push_back(s.to_json());
    }
    return arr;
}

void TemporalGraph::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot create `" + path.string() + "`");
    }
    out << to_json().dump(2) << '\n';
}

TemporalGraph TemporalGraph::load(const std::filesystem::path& path) {
    const auto j = read_json(path);
    if (!j.is_array()) {
        throw FormatError("temporal manifest must be a JSON array");
    }
    std::vector<SnapshotManifest> snaps;
    for (const auto& s : j) {
        snaps.push_back(SnapshotManifest::from_json(s));
    }
    return build_temporal_graph(std::move(snaps));
}

TemporalGraph build_temporal_graph(std::vector<SnapshotManifest> snapshots) {
    std::set<std::string> ids;
    for (const auto& s : snapshots) {
        if (!ids.insert(s.snapshot_id).second) {
            throw AssemblyError("duplicate snapshot id `" + s.snapshot_id + "`");
        }
    }
    std::stable_sort(snapshots.begin(), snapshots.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 1; i < snapshots.size(); ++i) {
        if (!(snapshots[i - 1].timestamp < snapshots[i].timestamp)) {
            throw AssemblyError("snapshots `" + snapshots[i - 1].snapshot_id + "` and `" + snapshots[i].snapshot_id +
                                "` share timestamp " + format_date(snapshots[i].timestamp));
        }
    }
    return TemporalGraph{std::move(snapshots)};
}

SnapshotView SnapshotView::load(const std::filesystem::path& dictionary, const std::filesystem::path& degrees) {
    const DegreeTable table = DegreeTable::open(degrees);
    SnapshotView view;
    DictionaryReader reader(dictionary);
    while (auto k = reader.next()) {
        view.keys.push_back(std::move(*k));
    }
    if (view.keys.size() != table.size()) {
        throw DataError("dictionary `" + dictionary.string() + "` has " + std::to_string(view.keys.size()) +
                        " keys but the degree table has " + std::to_string(table.size()));
    }
    view.out_degree.assign(table.out().begin(), table.out().end());
    return view;
}

nlohmann::json SnapshotDiff::to_json() const {
    const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return nlohmann::json{
        {"overlap_nodes", overlap_nodes},
        {"new_nodes", new_nodes},
        {"vanished_nodes", vanished_nodes},
        {"increased", increased},
        {"decreased", decreased},
        {"out_degree_increased_fraction", opt(out_degree_increased_fraction)},
        {"out_degree_decreased_fraction", opt(out_degree_decreased_fraction)},
    };
}

namespace {
std::vector<std::size_t> key_order(const SnapshotView& v) {
    if (v.keys.size() != v.out_degree.size()) {
        throw DataError("snapshot view has mismatched key and degree counts");
    }
    std::vector<std::size_t> order(v.keys.size());
    std::iota(order.begin(), order.end(), 0);
    if (!std::is_sorted(v.keys.begin(), v.keys.end())) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v.keys[a] < v.keys[b]; });
    }
    return order;
}
}  // namespace

SnapshotDiff snapshot_diff(const SnapshotView& prev, const SnapshotView& next) {
    const auto a = key_order(prev);
    const auto b = key_order(next);
    SnapshotDiff d;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && prev.keys[a[i]] < next.keys[b[j]])) {
            ++d.vanished_nodes;
            ++i;
        } else if (i == a.size() || next.keys[b[j]] < prev.keys[a[i]]) {
            ++d.new_nodes;
            ++j;
        } else {
            ++d.overlap_nodes;
            const auto before = prev.out_degree[a[i]];
            const auto after = next.out_degree[b[j]];
            d.increased += after > before;
            d.decreased += after < before;
            ++i;
            ++j;
        }
    }
    if (d.overlap_nodes > 0) {
        d.out_degree_increased_fraction = static_cast<double>(d.increased) / static_cast<double>(d.overlap_nodes);
        d.out_degree_decreased_fraction = static_cast<double>(d.decreased) / static_cast<double>(d.overlap_nodes);
    }
    return d;
}

}  // namespace credigraph
