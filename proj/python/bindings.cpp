#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "credigraph/archive.hpp"
#include "credigraph/degree.hpp"
#include "credigraph/edge_file.hpp"
#include "credigraph/embedding.hpp"
#include "credigraph/errors.hpp"
#include "credigraph/extract.hpp"
#include "credigraph/fixtures.hpp"
#include "credigraph/graph_build.hpp"
#include "credigraph/labels.hpp"
#include "credigraph/regression.hpp"
#include "credigraph/stats.hpp"
#include "credigraph/temporal.hpp"
#include "credigraph/text.hpp"
#include "credigraph/timeutil.hpp"
#include "credigraph/url.hpp"
#include "credigraph/utf8.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace credigraph;

namespace {

py::object from_json(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json to_json(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict record_dict(const WarcRecord& r) {
    py::dict d;
    d["type"] = std::string(to_string(r.record_type));
    d["uri"] = r.target_uri ? py::cast(*r.target_uri) : py::none();
    d["date"] = format_timestamp(r.date);
    d["headers"] = r.headers;
    d["payload"] = py::bytes(r.payload);
    return d;
}

std::vector<CredibilityLabel> labels_from(const std::vector<std::tuple<std::string, std::optional<double>, std::optional<double>>>& rows) {
    std::vector<CredibilityLabel> out;
    for (const auto& [key, pc1, mbfc] : rows) {
        auto k = NodeKey::from_reversed(key);
        if (!k) {
            throw ParameterError("invalid node key `" + key + "`");
        }
        out.push_back({*k, pc1, mbfc});
    }
    return out;
}

py::array_t<float> matrix_array(const EmbeddingMatrix& m) {
    py::array_t<float> a({m.rows(), m.dim()});
    auto v = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        for (std::size_t j = 0; j < m.dim(); ++j) v(i, j) = row[j];
    }
    return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Domain-level web graph construction and credibility regression.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto input = py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", input.ptr());
    py::register_exception<ParameterError>(m, "ParameterError", input.ptr());
    py::register_exception<DataError>(m, "DataError", input.ptr());
    py::register_exception<IoError>(m, "IoError", input.ptr());

    m.def("normalize_host", [](std::string_view url) -> std::optional<std::string> {
        auto r = normalize_host(url);
        return r ? std::optional<std::string>(r.key->str()) : std::nullopt;
    }, py::arg("url"), "Reversed-host key of an absolute URL, or None if the host is unusable.");
    m.def("resolve_url", &resolve_url, py::arg("base"), py::arg("ref"));
    m.def("snapshot_date", [](std::string_view crawl_start) {
        return format_date(iso_week_monday(parse_date(crawl_start)));
    }, py::arg("crawl_start"), "Monday of the ISO week containing the date.");

    m.def("read_archive", [](const fs::path& path) {
        ArchiveReader reader(path);
        py::list records;
        while (auto r = reader.next()) records.append(record_dict(*r));
        py::list errors;
        for (const auto& e : reader.errors()) errors.append(py::make_tuple(e.offset, e.message));
        return py::make_tuple(records, errors);
    }, py::arg("path"), "All records of a WARC/WAT/WET file and the (offset, message) errors skipped.");

    m.def("wat_links", [](const fs::path& path, bool include_all_links) {
        ArchiveReader reader(path);
        std::vector<std::pair<std::string, std::string>> out;
        while (auto r = reader.next()) {
            if (r->record_type != RecordType::kMetadata) continue;
            for (auto& l : extract_wat_links(*r, {include_all_links})) out.emplace_back(l.source_url, l.target_url);
        }
        return out;
    }, py::arg("path"), py::arg("include_all_links") = false);

    m.def("generate_fixtures", [](const fs::path& dir, std::size_t domains, std::size_t links, std::uint64_t seed) {
        FixtureOptions opt;
        opt.domains = domains;
        opt.links = links;
        opt.seed = seed;
        return from_json(generate_fixtures(dir, opt).to_json());
    }, py::arg("dir"), py::arg("domains") = 200, py::arg("links") = 10000, py::arg("seed") = 7);

    m.def("build_graph", [](const std::vector<std::pair<std::string, std::string>>& links, const fs::path& out_dir,
                            std::size_t batches) {
        if (batches == 0) throw ParameterError("batches must be positive");
        fs::create_directories(out_dir);
        ScratchDir scratch(default_scratch_root(), "cg-py");
        std::vector<fs::path> files;
        for (std::size_t b = 0; b < batches; ++b) {
            BatchGraphBuilder builder(scratch.path() / ("s" + std::to_string(b)));
            for (std::size_t i = b; i < links.size(); i += batches) builder.add_link({links[i].first, links[i].second});
            files.push_back(scratch.next_file("batch"));
            builder.write(files.back());
        }
        const auto r = merge_batches(files, {out_dir / "nodes.dict", out_dir / "edges.cgedge"}, scratch.path());
        return py::make_tuple(r.nodes, r.edges);
    }, py::arg("links"), py::arg("out_dir"), py::arg("batches") = 1,
       "Writes nodes.dict and edges.cgedge; returns (nodes, edges).");

    m.def("read_dictionary", [](const fs::path& p) { return NodeDictionary::load(p).keys(); }, py::arg("path"));
    m.def("read_edges", [](const fs::path& p) {
        const auto edges = read_all_edges(p);
        py::array_t<std::uint64_t> a({edges.size(), std::size_t{2}});
        auto v = a.mutable_unchecked<2>();
        for (std::size_t i = 0; i < edges.size(); ++i) {
            v(i, 0) = edges[i].src;
            v(i, 1) = edges[i].dst;
        }
        return a;
    }, py::arg("path"), "CGEDGE1 file as an (m, 2) uint64 array.");
    m.def("write_edges", [](const fs::path& p, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
        std::vector<Edge> edges;
        for (const auto& [s, d] : pairs) edges.push_back({s, d});
        write_edges(p, edges);
    }, py::arg("path"), py::arg("edges"));

    m.def("compute_degrees", [](const fs::path& edges, std::uint64_t n, const fs::path& out) {
        const auto t = compute_degrees(edges, n, out);
        return py::make_tuple(std::vector<std::uint32_t>(t.in().begin(), t.in().end()),
                              std::vector<std::uint32_t>(t.out().begin(), t.out().end()));
    }, py::arg("edges"), py::arg("n"), py::arg("out"), "Writes a CGDEG1 table; returns (in, out) degree lists.");

    m.def("filter_by_degree", [](const fs::path& edges, const fs::path& degrees, std::int64_t threshold,
                                 const fs::path& out_edges, bool inclusive) {
        const auto table = DegreeTable::open(degrees);
        const auto g = filter_by_degree(edges, table, threshold, {.edges = out_edges, .compact_map = {}, .dictionary_in = {}, .dictionary_out = {}},
                                        inclusive ? DegreeComparison::kGreaterEqual : DegreeComparison::kGreater);
        std::vector<NodeId> survivors;
        for (NodeId v = 0; v < table.size(); ++v) {
            if (g.survivors.contains(v)) survivors.push_back(v);
        }
        return py::make_tuple(survivors, g.edge_count);
    }, py::arg("edges"), py::arg("degrees"), py::arg("threshold") = 3, py::arg("out_edges"),
       py::arg("inclusive") = false, "Returns (surviving raw ids, kept edge count).");

    m.def("compute_stats", [](std::uint64_t n, std::uint64_t e) { return from_json(compute_stats(n, e).to_json()); },
          py::arg("nodes"), py::arg("edges"));
    m.def("retention", [](std::uint64_t rn, std::uint64_t re, std::uint64_t fn, std::uint64_t fe) {
        const auto r = filter_report({rn, re}, {fn, fe});
        return py::make_tuple(r.edge_text(), r.node_text());
    }, py::arg("raw_nodes"), py::arg("raw_edges"), py::arg("nodes"), py::arg("edges"),
       "(edge %, node %) retention as two-decimal strings.");

    m.def("sample_representative", [](const std::string& key, const std::vector<std::tuple<std::string, std::string, std::string>>& docs,
                                      std::size_t limit) {
        std::vector<KeptDocument> group;
        for (const auto& [url, time, text] : docs) {
            group.push_back({url, parse_timestamp(time), text, utf8::length(text)});
        }
        const auto b = sample_representative(*NodeKey::from_reversed(key), group, limit);
        std::vector<std::string> urls;
        for (const auto& d : b.documents_kept) urls.push_back(d.url);
        return py::make_tuple(urls, b.merged_text);
    }, py::arg("key"), py::arg("docs"), py::arg("limit") = kDefaultMergedTextLimit,
       "docs are (url, fetch time, text); returns (kept urls, merged text).");

    m.def("load_dqr", [](const fs::path& p) {
        const auto r = load_dqr(p);
        std::vector<std::tuple<std::string, std::optional<double>, std::optional<double>>> rows;
        for (const auto& l : r.labels) rows.emplace_back(l.node.str(), l.pc1, l.mbfc);
        return rows;
    }, py::arg("path"), "Rows of (node key, pc1, mbfc).");

    m.def("stratified_split", [](const std::vector<std::tuple<std::string, std::optional<double>, std::optional<double>>>& rows,
                                 const std::string& target, std::uint64_t seed, std::array<double, 3> ratios) {
        return from_json(stratified_split(labels_from(rows), parse_target(target), seed, ratios).to_json());
    }, py::arg("labels"), py::arg("target") = "pc1", py::arg("seed") = 0,
       py::arg("ratios") = std::array<double, 3>{0.6, 0.2, 0.2});

    m.def("snapshot_diff", [](std::vector<std::string> prev_keys, std::vector<std::uint32_t> prev_out,
                              std::vector<std::string> next_keys, std::vector<std::uint32_t> next_out) {
        return from_json(snapshot_diff({std::move(prev_keys), std::move(prev_out)}, {std::move(next_keys), std::move(next_out)}).to_json());
    }, py::arg("prev_keys"), py::arg("prev_out_degree"), py::arg("next_keys"), py::arg("next_out_degree"));

    m.def("pseudo_embed", [](std::string_view text, std::size_t dim, std::uint64_t seed) {
        const auto v = pseudo_embed(text, dim, seed);
        return py::array_t<float>(v.size(), v.data());
    }, py::arg("text"), py::arg("dim") = kDefaultEmbeddingDim, py::arg("seed") = 0);

    py::class_<EmbeddingMatrix>(m, "EmbeddingMatrix")
        .def(py::init<std::size_t, std::string>(), py::arg("dim"), py::arg("provider_tag") = "")
        .def_static("load", &EmbeddingMatrix::load, py::arg("path"))
        .def("save", &EmbeddingMatrix::save, py::arg("path"))
        .def("add_row", [](EmbeddingMatrix& self, std::string key, const std::vector<float>& values) {
            self.add_row(std::move(key), values);
        }, py::arg("key"), py::arg("values"))
        .def_property_readonly("dim", &EmbeddingMatrix::dim)
        .def_property_readonly("keys", &EmbeddingMatrix::keys)
        .def_property_readonly("provider_tag", &EmbeddingMatrix::provider_tag)
        .def("__len__", &EmbeddingMatrix::rows)
        .def("to_numpy", &matrix_array)
        .def("truncate", &mrl_truncate, py::arg("k"), "Prefix of k coordinates, renormalized.");

    m.def("synthetic_task", [](std::size_t n, std::size_t dim, std::uint64_t seed, bool signal) {
        auto t = synthetic_task(n, dim, seed, signal);
        std::vector<std::tuple<std::string, std::optional<double>, std::optional<double>>> rows;
        for (const auto& l : t.labels) rows.emplace_back(l.node.str(), l.pc1, l.mbfc);
        return py::make_tuple(std::move(t.features), rows);
    }, py::arg("n"), py::arg("dim"), py::arg("seed"), py::arg("signal") = true,
       "Returns (EmbeddingMatrix, label rows).");

    m.def("run_regression", [](const EmbeddingMatrix& features,
                               const std::vector<std::tuple<std::string, std::optional<double>, std::optional<double>>>& rows,
                               const py::dict& split, const py::object& config) {
        MlpConfig cfg;
        if (!config.is_none()) cfg = MlpConfig::from_json(to_json(config));
        const auto run = run_regression(features, labels_from(rows), RegressionSplit::from_json(to_json(split)), cfg);
        return from_json(run.report.to_json());
    }, py::arg("features"), py::arg("labels"), py::arg("split"), py::arg("config") = py::none(),
       "Trains the MLP on split['train'] and returns the report as a dict.");
}
