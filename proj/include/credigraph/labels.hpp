#pragma once

// Credibility labels: loading the domain rating table, joining it onto the
// node dictionary, and stratified train/validation/test splits.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "credigraph/edge_file.hpp"
#include "credigraph/url.hpp"

namespace credigraph {

enum class Target { kPc1, kMbfc };

std::string_view to_string(Target t) noexcept;
Target parse_target(std::string_view name);

struct CredibilityLabel {
    NodeKey node;
    std::optional<double> pc1;
    std::optional<double> mbfc;

    [[nodiscard]] std::optional<double> score(Target t) const noexcept { return t == Target::kPc1 ? pc1 : mbfc; }
};

struct LoadReport {
    std::uint64_t rows = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected_range = 0;   // a present score outside [0, 1] or unparsable
    std::uint64_t rejected_domain = 0;  // domain failed normalisation
    std::uint64_t rejected_empty = 0;   // neither score present
    std::uint64_t duplicates = 0;       // later rows replaced earlier ones
    std::vector<std::string> warnings;
};

struct LoadedLabels {
    std::vector<CredibilityLabel> labels;  // sorted by node key, unique
    LoadReport report;
};

// Delimited text (comma or TAB, detected from the header) with columns
// `domain`, `pc1`, `mbfc` in any order; other columns are ignored and empty
// cells mean absent. Throws FormatError if a required column is missing.
LoadedLabels load_dqr(const std::filesystem::path& path);
LoadedLabels parse_dqr(std::string_view contents);

struct LabeledNode {
    NodeId id = 0;
    CredibilityLabel label;
};

struct JoinResult {
    std::vector<LabeledNode> matched;  // ascending id
    std::vector<std::string> unmatched;
};

// Exact key match against a dictionary stream (ascending keys).
JoinResult join_labels(RecordSource<std::string>& dictionary, const std::vector<CredibilityLabel>& labels);
JoinResult join_labels(const NodeDictionary& dictionary, const std::vector<CredibilityLabel>& labels);

// Joined-label artifact: `node_key<TAB>node_id<TAB>pc1<TAB>mbfc`, empty cells
// for absent scores, header line first.
void write_labels_tsv(const std::filesystem::path& path, const JoinResult& joined);
std::vector<LabeledNode> read_labels_tsv(const std::filesystem::path& path);

inline constexpr std::size_t kStrata = 10;

struct RegressionSplit {
    Target target = Target::kPc1;
    std::uint64_t seed = 0;
    std::array<double, 3> ratios{0.6, 0.2, 0.2};
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;

    [[nodiscard]] nlohmann::json to_json() const;
    static RegressionSplit from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static RegressionSplit load(const std::filesystem::path& path);
};

// Stratum of a score: ten equal-width bins over [0, 1], 1.0 in the last.
std::size_t stratum_of(double score) noexcept;

// Labels with the target present are binned into ten strata. Each stratum is
// sorted by key, shuffled with SplitMix64(mix_seed(seed, stratum)), and cut
// so every part gets floor(ratio * n) or one more; the leftover units go to
// the parts furthest below their global round(ratio * N) quota. Throws
// ParameterError for fewer than 10 labelled nodes.
RegressionSplit stratified_split(const std::vector<CredibilityLabel>& labels, Target target, std::uint64_t seed,
                                 std::array<double, 3> ratios = {0.6, 0.2, 0.2});

}  // namespace credigraph
