#include "credigraph/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace credigraph {
namespace {

std::string with_commas(std::uint64_t v) {
    std::string digits = std::to_string(v);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i > 0 && (digits.size() - i) % 3 == 0) {
            out.push_back(',');
        }
        out.push_back(digits[i]);
    }
    return out;
}

}  // namespace

StatsReport compute_stats(std::uint64_t n_nodes, std::uint64_t n_edges) {
    if (n_nodes < 2) {
        throw DataError("edge density is undefined for fewer than two nodes");
    }
    StatsReport r;
    r.n_nodes = n_nodes;
    r.n_edges = n_edges;
    const double n = static_cast<double>(n_nodes);
    const double m = static_cast<double>(n_edges);
    r.mean_degree = 2.0 * m / n;
    r.edge_density = 2.0 * m / (n * (n - 1.0));
    return r;
}

StatsReport compute_stats(const DegreeTable& degrees) {
    std::uint64_t edges = 0;
    std::uint64_t isolated = 0;
    std::uint64_t leaves = 0;
    std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t hi = 0;
    const auto out = degrees.out();
    for (NodeId v = 0; v < degrees.size(); ++v) {
        const std::uint64_t d = degrees.total(v);
        edges += out[v];
        isolated += d == 0;
        leaves += d == 1;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    StatsReport r = compute_stats(degrees.size(), edges);
    r.isolated = isolated;
    r.leaves = leaves;
    r.min_degree = lo;
    r.max_degree = hi;
    return r;
}

std::string StatsReport::density_text() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", edge_density);
    return buf;
}

std::string StatsReport::mean_text() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", mean_degree);
    return buf;
}

nlohmann::json StatsReport::to_json() const {
    nlohmann::json j{
        {"n_nodes", n_nodes},
        {"n_edges", n_edges},
        {"edge_density", edge_density},
        {"edge_density_text", density_text()},
        {"mean_degree", mean_degree},
        {"mean_degree_text", mean_text()},
    };
    const auto opt = [&](const char* name, const std::optional<std::uint64_t>& v) {
        j[name] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    opt("isolated", isolated);
    opt("leaves", leaves);
    opt("min_degree", min_degree);
    opt("max_degree", max_degree);
    return j;
}

std::string StatsReport::to_table(std::string_view column) const {
    const auto opt = [](const std::optional<std::uint64_t>& v) { return v ? with_commas(*v) : std::string("-"); };
    const std::vector<std::pair<std::string, std::string>> rows{
        {"Number of nodes", with_commas(n_nodes)},
        {"Number of edges", with_commas(n_edges)},
        {"Isolated nodes (deg = 0)", opt(isolated)},
        {"Leaves (deg = 1)", opt(leaves)},
        {"Edge density", density_text()},
        {"Min. degree", opt(min_degree)},
        {"Max. degree", opt(max_degree)},
        {"Mean degree", mean_text()},
    };
    std::size_t w0 = 7;
    std::size_t w1 = column.size();
    for (const auto& [k, v] : rows) {
        w0 = std::max(w0, k.size());
        w1 = std::max(w1, v.size());
    }
    std::ostringstream os;
    const auto line = [&](std::string_view a, std::string_view b) {
        os << a << std::string(w0 - a.size() + 2, ' ') << std::string(w1 - b.size(), ' ') << b << '\n';
    };
    line("Feature", column);
    for (const auto& [k, v] : rows) {
        line(k, v);
    }
    return os.str();
}

}  // namespace credigraph
