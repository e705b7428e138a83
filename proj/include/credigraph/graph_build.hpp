#pragma once

// Domain-level graph construction: per-batch aggregation into sorted,
// deduplicated batch files, then an external k-way merge into a global
// dictionary and a CGEDGE1 edge list.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "credigraph/edge_file.hpp"
#include "credigraph/external_sort.hpp"
#include "credigraph/extract.hpp"

namespace credigraph {

struct BatchStats {
    std::uint64_t pages = 0;
    std::uint64_t links = 0;
    std::uint64_t rejected_hosts = 0;
    std::uint64_t self_links = 0;
    std::uint64_t domains = 0;
    std::uint64_t edges = 0;
};

// Accumulates one batch of pages and links. Memory is capped by
// `options.memory_budget_bytes`; beyond it the key and edge buffers spill to
// sorted runs under `scratch`.
class BatchGraphBuilder {
   public:
    explicit BatchGraphBuilder(std::filesystem::path scratch, SortOptions options = {});
    ~BatchGraphBuilder();

    // Registers the page's domain as a node even if it has no outgoing links.
    void add_page(std::string_view url);
    void add_link(const PageLink& link);

    // Writes the `CGBATCH1` file. The builder cannot be reused afterwards.
    BatchStats write(const std::filesystem::path& batch_file);

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Convenience: build and write a batch from an in-memory link list.
BatchStats build_batch_graph(const std::vector<PageLink>& links, const std::filesystem::path& batch_file,
                             const std::filesystem::path& scratch, SortOptions options = {});

// Sequential readers over the two sections of a batch file. Both validate the
// version line and strict ordering; violations throw FormatError.
std::unique_ptr<RecordSource<std::string>> open_batch_domains(const std::filesystem::path& batch_file);
std::unique_ptr<RecordSource<std::pair<std::string, std::string>>> open_batch_edges(
    const std::filesystem::path& batch_file);

struct MergeOutputs {
    std::filesystem::path dictionary;
    std::filesystem::path edges;
};

struct MergeResult {
    std::uint64_t nodes = 0;
    std::uint64_t edges = 0;
};

// Merges batch files (any order) into a dictionary with ids in lexicographic
// key order and an edge list sorted by (src, dst). Resident memory is one
// heap entry per batch plus the sort buffers.
MergeResult merge_batches(const std::vector<std::filesystem::path>& batch_files, const MergeOutputs& outputs,
                          const std::filesystem::path& scratch, SortOptions options = {});

}  // namespace credigraph
