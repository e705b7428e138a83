#pragma once

// Synthetic crawl corpora with recorded ground truth: WAT and WET archives,
// a rating table and a homepage stub map over a fixed population of hosts.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "credigraph/timeutil.hpp"

namespace credigraph {

struct FixtureOptions {
    std::size_t domains = 200;
    std::size_t links = 10000;  // anchors across all pages, valid or not
    std::uint64_t seed = 7;
    std::size_t wat_files = 4;
    std::size_t wet_files = 2;
    double text_coverage = 0.75;   // domains with archived documents
    double stub_coverage = 0.5;    // of the remaining domains, answered by the stub map
    double label_coverage = 0.6;   // domains rated in the table
    std::size_t threshold = 3;     // filter threshold recorded in the truth file
    std::string crawl_start = "2024-12-01";
};

struct FixtureTruth {
    std::uint64_t nodes = 0;
    std::uint64_t edges = 0;
    std::uint64_t wat_records = 0;   // metadata records (pages)
    std::uint64_t anchors = 0;       // anchor links written
    std::uint64_t rejected_links = 0;
    std::uint64_t self_links = 0;
    std::uint64_t wet_records = 0;   // conversion records
    std::uint64_t wet_skipped = 0;   // conversion records with unusable hosts
    std::uint64_t domains_with_text = 0;
    std::uint64_t stub_entries = 0;
    std::uint64_t fetch_misses = 0;
    std::uint64_t label_rows = 0;
    std::uint64_t labels_valid = 0;
    std::uint64_t labels_matched = 0;
    std::uint64_t filtered_nodes = 0;
    std::uint64_t filtered_edges = 0;
    std::size_t threshold = 3;
    double mean_degree = 0.0;
    double density = 0.0;
    std::vector<std::string> wat_files;
    std::vector<std::string> wet_files;
    std::string dqr;
    std::string homepages;

    [[nodiscard]] nlohmann::json to_json() const;
};

// Canonical host of fixture domain `i` (independent of the seed, so corpora
// generated with different seeds share their host population).
std::string fixture_host(std::size_t i);

// Writes wat/, wet/, dqr.csv, homepages.json and truth.json under `dir`.
FixtureTruth generate_fixtures(const std::filesystem::path& dir, const FixtureOptions& options);

}  // namespace credigraph
