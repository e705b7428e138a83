#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "credigraph/degree.hpp"

namespace credigraph {

// Structural summary of one snapshot. Degrees are total (in + out) degrees;
// mean degree is 2|E|/|V| and edge density 2|E|/(|V|(|V|-1)).
struct StatsReport {
    std::uint64_t n_nodes = 0;
    std::uint64_t n_edges = 0;
    // Only available when computed from a degree table.
    std::optional<std::uint64_t> isolated;
    std::optional<std::uint64_t> leaves;
    std::optional<std::uint64_t> min_degree;
    std::optional<std::uint64_t> max_degree;
    double edge_density = 0.0;
    double mean_degree = 0.0;

    [[nodiscard]] std::string density_text() const;  // "1.28e-07"
    [[nodiscard]] std::string mean_text() const;     // "16.97"
    [[nodiscard]] nlohmann::json to_json() const;
    // Aligned two-column table with the usual row names.
    [[nodiscard]] std::string to_table(std::string_view column = "value") const;
};

// From counts alone. Throws DataError if n_nodes < 2.
StatsReport compute_stats(std::uint64_t n_nodes, std::uint64_t n_edges);

// One pass over the degree table. Throws DataError if the table has < 2 nodes.
StatsReport compute_stats(const DegreeTable& degrees);

}  // namespace credigraph
