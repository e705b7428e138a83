// credigraph: command-line driver for the crawl-to-graph pipeline.
//
// Every subcommand writes its artifacts plus `<command>.manifest.json` into
// --out. A rerun whose inputs and settings hash to the recorded run is
// skipped unless --force is given.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "credigraph/archive.hpp"
#include "credigraph/degree.hpp"
#include "credigraph/embedding.hpp"
#include "credigraph/errors.hpp"
#include "credigraph/extract.hpp"
#include "credigraph/fixtures.hpp"
#include "credigraph/graph_build.hpp"
#include "credigraph/labels.hpp"
#include "credigraph/manifest.hpp"
#include "credigraph/regression.hpp"
#include "credigraph/stats.hpp"
#include "credigraph/temporal.hpp"
#include "credigraph/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace credigraph;

namespace {

constexpr int kExitUsage = 64;

Timestamp now() { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); }

class Log {
   public:
    void command(std::string c) { command_ = std::move(c); }
    void info(std::string_view event, json fields = json::object()) { emit("info", event, std::move(fields)); }
    void warn(std::string_view event, json fields = json::object()) { emit("warn", event, std::move(fields)); }
    void error(std::string_view event, json fields = json::object()) { emit("error", event, std::move(fields)); }

   private:
    void emit(std::string_view level, std::string_view event, json fields) {
        fields["ts"] = format_timestamp(now());
        fields["level"] = level;
        fields["command"] = command_;
        fields["event"] = event;
        std::lock_guard lock(mu_);
        std::cerr << fields.dump() << '\n';
    }
    std::mutex mu_;
    std::string command_ = "credigraph";
};

Log g_log;

// Shared per-run bookkeeping: input hashing, rerun detection, manifest.
class Job {
   public:
    Job(std::string command, fs::path out, bool force) : out_(std::move(out)), force_(force) {
        m_.command = std::move(command);
        m_.started = now();
        g_log.command(m_.command);
    }

    void input(const fs::path& p) { m_.inputs.push_back(describe_path(p)); }
    void config(json c) { m_.config = std::move(c); }
    void output(const fs::path& p) { outputs_.push_back(p); }
    void count(const std::string& name, std::uint64_t v) { m_.counters[name] = v; }
    void add(const std::string& name, std::uint64_t v) { m_.counters[name] += v; }

    [[nodiscard]] fs::path manifest_path() const { return out_ / (m_.command + ".manifest.json"); }

    // True if the work must run.
    bool begin() {
        fs::create_directories(out_);
        hash_ = run_hash(m_.command, m_.inputs, m_.config);
        if (!force_ && is_up_to_date(manifest_path(), hash_)) {
            g_log.info("skipped", {{"reason", "inputs and settings unchanged"}, {"manifest", manifest_path()}});
            std::cout << "skipped " << m_.command << " (up to date: " << manifest_path().string() << ")\n";
            return false;
        }
        g_log.info("start", {{"out", out_}});
        return true;
    }

    void finish() {
        for (const auto& p : outputs_) {
            m_.outputs.push_back(describe_path(p));
        }
        m_.run_hash = hash_;
        m_.finished = now();
        m_.save(manifest_path());
        g_log.info("finished", {{"counters", m_.counters}});
        std::cout << "done " << m_.command << " -> " << out_.string() << '\n';
    }

   private:
    JobManifest m_;
    fs::path out_;
    bool force_;
    std::string hash_;
    std::vector<fs::path> outputs_;
};

// Files given directly, plus the regular files inside given directories.
// Directories are searched recursively for `*.<kind>` or `*.<kind>.gz`
// files; explicit file arguments are taken as given.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& items, std::string_view kind) {
    const std::string plain = "." + std::string(kind);
    const std::string gz = plain + ".gz";
    std::vector<fs::path> out;
    for (const auto& item : items) {
        if (fs::is_directory(item)) {
            std::vector<fs::path> files;
            for (const auto& e : fs::recursive_directory_iterator(item)) {
                const auto name = e.path().filename().string();
                if (e.is_regular_file() && (name.ends_with(plain) || name.ends_with(gz))) {
                    files.push_back(e.path());
                }
            }
            std::sort(files.begin(), files.end());
            out.insert(out.end(), files.begin(), files.end());
        } else if (fs::exists(item)) {
            out.emplace_back(item);
        } else {
            throw IoError("input `" + item + "` does not exist");
        }
    }
    if (out.empty()) {
        throw ParameterError("no input files");
    }
    return out;
}

SortOptions sort_options(std::size_t memory_mb, std::size_t share = 1) {
    SortOptions o;
    o.memory_budget_bytes = std::max<std::size_t>(1, memory_mb) * (std::size_t{1} << 20) / std::max<std::size_t>(1, share);
    return o;
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) {
        throw IoError("cannot create `" + p.string() + "`");
    }
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) {
        throw IoError("cannot open `" + p.string() + "`");
    }
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw FormatError("`" + p.string() + "` is not JSON");
    }
    return j;
}

std::vector<CredibilityLabel> labels_of(const std::vector<LabeledNode>& nodes) {
    std::vector<CredibilityLabel> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) {
        out.push_back(n.label);
    }
    return out;
}

std::string abs_string(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

// Options shared by every subcommand.
struct Common {
    std::string out;
    bool force = false;
    std::size_t workers = 1;
    std::size_t memory_mb = 256;
};

void add_common(CLI::App* sub, Common& c, bool with_workers) {
    sub->add_option("--out", c.out, "Output directory")->required();
    sub->add_flag("--force", c.force, "Run even if an identical run is recorded");
    sub->add_option("--memory-mb", c.memory_mb, "Sort buffer budget in MiB")->capture_default_str();
    if (with_workers) {
        sub->add_option("--workers", c.workers, "Parallel workers (outputs do not depend on it)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }
}

// ---------------------------------------------------------------- commands

struct GenFixturesArgs {
    Common c;
    FixtureOptions f;
};

void run_gen_fixtures(const GenFixturesArgs& a) {
    Job job("gen-fixtures", a.c.out, a.c.force);
    job.config({{"domains", a.f.domains},
                {"links", a.f.links},
                {"seed", a.f.seed},
                {"wat_files", a.f.wat_files},
                {"wet_files", a.f.wet_files},
                {"threshold", a.f.threshold},
                {"crawl_start", a.f.crawl_start}});
    if (!job.begin()) {
        return;
    }
    const auto truth = generate_fixtures(a.c.out, a.f);
    for (const auto& f : truth.wat_files) job.output(f);
    for (const auto& f : truth.wet_files) job.output(f);
    job.output(truth.dqr);
    job.output(truth.homepages);
    job.output(fs::path(a.c.out) / "truth.json");
    job.count("wat_records", truth.wat_records);
    job.count("wet_records", truth.wet_records);
    job.count("nodes", truth.nodes);
    job.count("edges", truth.edges);
    job.finish();
}

struct BuildGraphArgs {
    Common c;
    std::vector<std::string> wat;
    std::size_t batch_size = 300;
    bool all_links = false;
    std::string snapshot_id = "snapshot";
    std::string crawl_start;
};

void run_build_graph(const BuildGraphArgs& a) {
    const auto files = expand_inputs(a.wat, "wat");
    Job job("build-graph", a.c.out, a.c.force);
    for (const auto& f : files) job.input(f);
    job.config({{"batch_size", a.batch_size},
                {"include_all_links", a.all_links},
                {"snapshot_id", a.snapshot_id},
                {"crawl_start", a.crawl_start}});
    if (!job.begin()) {
        return;
    }
    const fs::path out = a.c.out;
    ScratchDir scratch(default_scratch_root(), "build");
    const std::size_t n_batches = (files.size() + a.batch_size - 1) / a.batch_size;
    std::vector<fs::path> batch_files(n_batches);
    std::vector<BatchStats> stats(n_batches);
    std::vector<std::uint64_t> record_errors(n_batches, 0);
    std::vector<std::uint64_t> bad_payloads(n_batches, 0);
    std::vector<std::optional<Timestamp>> first_seen(n_batches);
    std::vector<std::exception_ptr> failures(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        batch_files[b] = scratch.path() / ("batch-" + std::to_string(b) + ".cgbatch");
    }
    const std::size_t workers = std::min(a.c.workers, std::max<std::size_t>(1, n_batches));
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t b; (b = next.fetch_add(1)) < n_batches;) {
            try {
                const fs::path dir = scratch.path() / ("work-" + std::to_string(b));
                fs::create_directories(dir);
                BatchGraphBuilder builder(dir, sort_options(a.c.memory_mb, workers));
                const std::size_t end = std::min(files.size(), (b + 1) * a.batch_size);
                for (std::size_t i = b * a.batch_size; i < end; ++i) {
                    ArchiveReader reader(files[i]);
                    reader.on_error([&, file = files[i].string()](const RecordError& e) {
                        g_log.warn("record_error", {{"file", file}, {"offset", e.offset}, {"message", e.message}});
                    });
                    while (auto rec = reader.next()) {
                        if (rec->record_type != RecordType::kMetadata) {
                            continue;
                        }
                        if (!first_seen[b] || rec->date < *first_seen[b]) {
                            first_seen[b] = rec->date;
                        }
                        try {
                            const auto page = wat_page_uri(*rec);
                            if (!page) {
                                continue;
                            }
                            builder.add_page(*page);
                            for (const auto& link : extract_wat_links(*rec, LinkOptions{a.all_links})) {
                                builder.add_link(link);
                            }
                        } catch (const FormatError& e) {
                            ++bad_payloads[b];
                        }
                    }
                    record_errors[b] += reader.errors().size();
                }
                stats[b] = builder.write(batch_files[b]);
                fs::remove_all(dir);
            } catch (...) {
                failures[b] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(work);
        }
        work();
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    BatchStats total;
    std::optional<Timestamp> earliest;
    for (std::size_t b = 0; b < n_batches; ++b) {
        total.pages += stats[b].pages;
        total.links += stats[b].links;
        total.rejected_hosts += stats[b].rejected_hosts;
        total.self_links += stats[b].self_links;
        job.add("record_errors", record_errors[b]);
        job.add("bad_payloads", bad_payloads[b]);
        if (first_seen[b] && (!earliest || *first_seen[b] < *earliest)) {
            earliest = first_seen[b];
        }
    }
    const MergeOutputs mo{out / "nodes.dict", out / "edges.cgedge"};
    const auto merged = merge_batches(batch_files, mo, scratch.path(), sort_options(a.c.memory_mb));
    compute_degrees(mo.edges, merged.nodes, out / "degrees.cgdeg");

    SnapshotManifest snap;
    snap.snapshot_id = a.snapshot_id;
    const Date start = !a.crawl_start.empty() ? parse_date(a.crawl_start)
                       : earliest              ? std::chrono::floor<std::chrono::days>(*earliest)
                                               : Date{};
    snap.timestamp = assign_timestamp(a.snapshot_id, start);
    snap.files = {{"dictionary", abs_string(mo.dictionary)},
                  {"edges", abs_string(mo.edges)},
                  {"degrees", abs_string(out / "degrees.cgdeg")}};
    snap.counts = {{"nodes", merged.nodes}, {"edges", merged.edges}};
    snap.format_versions = {{"dictionary", "CGDICT1"}, {"edges", "CGEDGE1"}, {"degrees", "CGDEG1"}};
    snap.save(out / "snapshot.json");

    job.count("files", files.size());
    job.count("batches", n_batches);
    job.count("pages", total.pages);
    job.count("links", total.links);
    job.count("rejected_hosts", total.rejected_hosts);
    job.count("self_links", total.self_links);
    job.count("nodes", merged.nodes);
    job.count("edges", merged.edges);
    for (const auto* name : {"nodes.dict", "edges.cgedge", "degrees.cgdeg", "snapshot.json"}) {
        job.output(out / name);
    }
    job.finish();
}

struct FilterArgs {
    Common c;
    std::string graph;
    std::int64_t threshold = 3;
    bool inclusive = false;
};

void run_filter(const FilterArgs& a) {
    const fs::path g = a.graph;
    Job job("filter", a.c.out, a.c.force);
    for (const auto* name : {"nodes.dict", "edges.cgedge", "degrees.cgdeg"}) job.input(g / name);
    job.config({{"threshold", a.threshold}, {"comparison", a.inclusive ? ">=" : ">"}});
    if (!job.begin()) {
        return;
    }
    const fs::path out = a.c.out;
    const auto raw = DegreeTable::open(g / "degrees.cgdeg");
    const std::uint64_t raw_edges = EdgeReader(g / "edges.cgedge").count();
    const FilterOutputs fo{out / "edges.cgedge", out / "id_map.tsv", g / "nodes.dict", out / "nodes.dict"};
    const auto cmp = a.inclusive ? DegreeComparison::kGreaterEqual : DegreeComparison::kGreater;
    std::string source_id = "snapshot";
    if (fs::exists(g / "snapshot.json")) {
        source_id = SnapshotManifest::load(g / "snapshot.json").snapshot_id;
    }
    const auto fg = filter_by_degree(g / "edges.cgedge", raw, a.threshold, fo, cmp, source_id);
    compute_degrees(fo.edges, fg.node_count(), out / "degrees.cgdeg");
    const auto report = filter_report({raw.size(), raw_edges}, {fg.node_count(), fg.edge_count});
    write_json(out / "retention.json", {{"threshold", a.threshold},
                                        {"comparison", a.inclusive ? ">=" : ">"},
                                        {"raw", {{"nodes", raw.size()}, {"edges", raw_edges}}},
                                        {"filtered", {{"nodes", fg.node_count()}, {"edges", fg.edge_count}}},
                                        {"edge_retention_pct", report.edge_retention_pct},
                                        {"node_retention_pct", report.node_retention_pct},
                                        {"edge_retention", report.edge_text() + "%"},
                                        {"node_retention", report.node_text() + "%"}});
    SnapshotManifest snap;
    if (fs::exists(g / "snapshot.json")) {
        snap = SnapshotManifest::load(g / "snapshot.json");
    }
    snap.snapshot_id = source_id;
    snap.files = {{"dictionary", abs_string(fo.dictionary_out)},
                  {"edges", abs_string(fo.edges)},
                  {"degrees", abs_string(out / "degrees.cgdeg")},
                  {"id_map", abs_string(fo.compact_map)}};
    snap.counts = {{"nodes", fg.node_count()}, {"edges", fg.edge_count}};
    snap.format_versions = {{"dictionary", "CGDICT1"}, {"edges", "CGEDGE1"}, {"degrees", "CGDEG1"}};
    snap.save(out / "snapshot.json");
    job.count("nodes", fg.node_count());
    job.count("edges", fg.edge_count);
    for (const auto* name : {"nodes.dict", "edges.cgedge", "degrees.cgdeg", "id_map.tsv", "retention.json",
                             "snapshot.json"}) {
        job.output(out / name);
    }
    job.finish();
}

struct StatsArgs {
    Common c;
    std::string graph;
};

void run_stats(const StatsArgs& a) {
    const fs::path g = a.graph;
    Job job("stats", a.c.out, a.c.force);
    job.input(g / "degrees.cgdeg");
    job.input(g / "edges.cgedge");
    if (!job.begin()) {
        return;
    }
    const fs::path out = a.c.out;
    const auto table = DegreeTable::open(g / "degrees.cgdeg");
    const auto report = compute_stats(table);
    const auto edges = EdgeReader(g / "edges.cgedge").count();
    if (edges != report.n_edges) {
        throw DataError("degree table implies " + std::to_string(report.n_edges) + " edges, edge file has " +
                        std::to_string(edges));
    }
    write_json(out / "stats.json", report.to_json());
    std::ofstream(out / "stats.txt") << report.to_table();
    job.count("nodes", report.n_nodes);
    job.count("edges", report.n_edges);
    job.output(out / "stats.json");
    job.output(out / "stats.txt");
    job.finish();
}

struct ExtractTextArgs {
    Common c;
    std::vector<std::string> wet;
    std::string graph;
    std::string homepages;
    std::size_t limit = kDefaultMergedTextLimit;
};

std::string_view status_name(FetchOutcome::Status s) {
    switch (s) {
        case FetchOutcome::Status::kOk: return "ok";
        case FetchOutcome::Status::kAbsent: return "absent";
        case FetchOutcome::Status::kTimeout: return "timeout";
        case FetchOutcome::Status::kError: return "error";
    }
    return "error";
}

void run_extract_text(const ExtractTextArgs& a) {
    const auto files = expand_inputs(a.wet, "wet");
    const fs::path g = a.graph;
    Job job("extract-text", a.c.out, a.c.force);
    for (const auto& f : files) job.input(f);
    job.input(g / "nodes.dict");
    if (!a.homepages.empty()) job.input(a.homepages);
    job.config({{"limit", a.limit}, {"homepages", !a.homepages.empty()}});
    if (!job.begin()) {
        return;
    }
    const fs::path out = a.c.out;
    ScratchDir scratch(default_scratch_root(), "text");
    DocumentGrouper grouper(scratch.path(), sort_options(a.c.memory_mb));
    std::uint64_t records = 0;
    std::uint64_t rejected = 0;
    std::uint64_t errors = 0;
    for (const auto& f : files) {
        ArchiveReader reader(f);
        while (auto rec = reader.next()) {
            if (rec->record_type != RecordType::kConversion) {
                continue;
            }
            ++records;
            try {
                grouper.add(extract_wet_document(*rec));
            } catch (const RecordRejected&) {
                ++rejected;
            }
        }
        errors += reader.errors().size();
    }

    // Archived bundles for graph nodes; graph nodes without any go to the
    // homepage fetcher. Both streams are in key order.
    const fs::path archived = scratch.path() / "archived.cgtxt";
    BundleWriter archived_writer(archived);
    DictionaryReader dict(g / "nodes.dict");
    std::optional<std::string> key = dict.next();
    std::vector<NodeKey> missing;
    std::uint64_t outside = 0;
    const auto drain_until = [&](const std::string* upto) {
        while (key && (upto == nullptr || *key < *upto)) {
            if (auto k = NodeKey::from_reversed(*key)) {
                missing.push_back(std::move(*k));
            }
            key = dict.next();
        }
    };
    grouper.for_each_bundle(a.limit, [&](DomainTextBundle&& b) {
        drain_until(&b.node.str());
        if (key && *key == b.node.str()) {
            archived_writer.write(b);
            key = dict.next();
        } else {
            ++outside;
        }
    });
    drain_until(nullptr);
    archived_writer.close();

    FetchResult fetched;
    if (!a.homepages.empty()) {
        auto stub = StubFetcher::from_json_file(a.homepages);
        fetched = fetch_missing(missing, stub, FetchOptions{a.c.workers, a.limit});
    } else {
        for (auto& k : missing) {
            fetched.misses.push_back({std::move(k), FetchOutcome::Status::kAbsent, "no homepage source configured"});
        }
    }

    BundleWriter writer(out / "text.cgtxt");
    BundleReader from_archive(archived);
    auto next_archived = from_archive.next();
    std::size_t fi = 0;
    while (next_archived || fi < fetched.bundles.size()) {
        if (fi == fetched.bundles.size() ||
            (next_archived && next_archived->node.str() < fetched.bundles[fi].node.str())) {
            writer.write(*next_archived);
            next_archived = from_archive.next();
        } else {
            writer.write(fetched.bundles[fi++]);
        }
    }
    writer.close();
    {
        std::ofstream misses(out / "text_misses.tsv", std::ios::trunc);
        misses << "node_key\tstatus\terror\n";
        for (const auto& m : fetched.misses) {
            misses << m.node.str() << '\t' << status_name(m.status) << '\t' << m.error << '\n';
        }
    }
    job.count("wet_records", records);
    job.count("documents", grouper.added());
    job.count("skipped_hosts", grouper.skipped());
    job.count("rejected_records", rejected);
    job.count("record_errors", errors);
    job.count("outside_graph", outside);
    job.count("bundles", writer.count());
    job.count("fetched", fetched.bundles.size());
    job.count("misses", fetched.misses.size());
    job.output(out / "text.cgtxt");
    job.output(out / "text_misses.tsv");
    job.finish();
}

struct EmbedArgs {
    Common c;
    std::string text;
    std::string provider = "pseudo";
    std::size_t dim = kDefaultEmbeddingDim;
    std::size_t mrl = kDefaultMrlDim;
    std::uint64_t seed = 0;
    std::size_t batch_size = 32;
    std::size_t retries = 2;
};

void run_embed(const EmbedArgs& a) {
    Job job("embed", a.c.out, a.c.force);
    job.input(a.text);
    job.config({{"provider", a.provider},
                {"dim", a.dim},
                {"mrl", a.mrl},
                {"seed", a.seed},
                {"batch_size", a.batch_size},
                {"retries", a.retries}});
    if (!job.begin()) {
        return;
    }
    const fs::path out = a.c.out;
    std::unique_ptr<EmbeddingProvider> provider;
    if (a.provider == "pseudo") {
        provider = std::make_unique<PseudoEmbeddingProvider>(a.dim, a.seed);
    } else if (a.provider == "constant") {
        provider = std::make_unique<ConstantProvider>(a.dim, 1.0f);
    } else {
        throw ParameterError("unknown embedding provider `" + a.provider + "` (expected pseudo or constant)");
    }
    BundleReader bundles(a.text);
    auto result = ingest_embeddings(bundles, *provider, IngestOptions{a.batch_size, a.retries},
                                    out / "embeddings.cgemb");
    job.output(out / "embeddings.cgemb");
    if (a.mrl > 0) {
        const auto name = "embeddings.mrl" + std::to_string(a.mrl) + ".cgemb";
        mrl_truncate(result.matrix, a.mrl).save(out / name);
        job.output(out / name);
    }
    {
        std::ofstream missing(out / "embed_missing.txt", std::ios::trunc);
        for (const auto& k : result.missing) {
            missing << k << '\n';
        }
    }
    job.output(out / "embed_missing.txt");
    job.count("rows", result.matrix.rows());
    job.count("missing", result.missing.size());
    job.finish();
}

struct JoinLabelsArgs {
    Common c;
    std::string dqr;
    std::string graph;
};

void run_join_labels(const JoinLabelsArgs& a) {
    const fs::path g = a.graph;
    Job job("join-labels", a.c.out, a.c.force);
    job.input(a.dqr);
    job.input(g / "nodes.dict");
    if (!job.begin()) {
        return;
    }
    const fs::path out = a.c.out;
    const auto loaded = load_dqr(a.dqr);
    for (const auto& w : loaded.report.warnings) {
        g_log.warn("label_row", {{"message", w}});
    }
    DictionaryReader dict(g / "nodes.dict");
    const auto joined = join_labels(dict, loaded.labels);
    write_labels_tsv(out / "labels.tsv", joined);
    const auto& r = loaded.report;
    write_json(out / "join_report.json", {{"rows", r.rows},
                                          {"accepted", r.accepted},
                                          {"rejected_range", r.rejected_range},
                                          {"rejected_domain", r.rejected_domain},
                                          {"rejected_empty", r.rejected_empty},
                                          {"duplicates", r.duplicates},
                                          {"matched", joined.matched.size()},
                                          {"unmatched", joined.unmatched.size()},
                                          {"unmatched_keys", joined.unmatched}});
    job.count("rows", r.rows);
    job.count("accepted", r.accepted);
    job.count("matched", joined.matched.size());
    job.count("unmatched", joined.unmatched.size());
    job.output(out / "labels.tsv");
    job.output(out / "join_report.json");
    job.finish();
}

struct SplitArgs {
    Common c;
    std::string labels;
    std::string embeddings;
    std::string target = "pc1";
    std::uint64_t seed = 0;
    std::vector<double> ratios{0.6, 0.2, 0.2};
};

void run_split(const SplitArgs& a) {
    if (a.ratios.size() != 3) {
        throw ParameterError("--ratios takes exactly three values");
    }
    Job job("split", a.c.out, a.c.force);
    job.input(a.labels);
    if (!a.embeddings.empty()) job.input(a.embeddings);
    job.config({{"target", a.target}, {"seed", a.seed}, {"ratios", a.ratios}});
    if (!job.begin()) {
        return;
    }
    auto labels = labels_of(read_labels_tsv(a.labels));
    std::uint64_t dropped = 0;
    if (!a.embeddings.empty()) {
        const auto features = EmbeddingMatrix::load(a.embeddings);
        const auto before = labels.size();
        std::erase_if(labels, [&](const CredibilityLabel& l) { return !features.find(l.node.str()); });
        dropped = before - labels.size();
        if (dropped > 0) {
            g_log.warn("labels_without_features", {{"dropped", dropped}});
        }
    }
    const auto split =
        stratified_split(labels, parse_target(a.target), a.seed, {a.ratios[0], a.ratios[1], a.ratios[2]});
    const fs::path out = fs::path(a.c.out) / "split.json";
    split.save(out);
    job.count("without_features", dropped);
    job.count("train", split.train.size());
    job.count("val", split.val.size());
    job.count("test", split.test.size());
    job.output(out);
    job.finish();
}

struct TrainArgs {
    Common c;
    std::string embeddings;
    std::string labels;
    std::string split;
    std::string target;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 200;
    double learning_rate = 0.001;
};

void run_train_mlp(const TrainArgs& a) {
    Job job("train-mlp", a.c.out, a.c.force);
    job.input(a.embeddings);
    job.input(a.labels);
    job.input(a.split);
    MlpConfig cfg;
    cfg.seed = a.seed;
    cfg.max_iterations = a.max_iterations;
    cfg.learning_rate = a.learning_rate;
    job.config({{"target", a.target}, {"mlp", cfg.to_json()}});
    if (!job.begin()) {
        return;
    }
    const fs::path out = a.c.out;
    const auto split = RegressionSplit::load(a.split);
    if (!a.target.empty() && parse_target(a.target) != split.target) {
        throw ParameterError("--target " + a.target + " does not match the split's target " +
                             std::string(to_string(split.target)));
    }
    const auto features = EmbeddingMatrix::load(a.embeddings);
    const auto labels = labels_of(read_labels_tsv(a.labels));
    const auto run = run_regression(features, labels, split, cfg);
    write_json(out / "report.json", run.report.to_json());
    run.model.save(out / "model.cgmlp");
    job.count("iterations", run.report.iterations);
    job.count("best_iteration", run.report.best_iteration);
    job.count("test_nodes", run.report.n_test);
    job.output(out / "report.json");
    job.output(out / "model.cgmlp");
    job.finish();
}

struct ExportArgs {
    Common c;
    std::string model;
    std::string embeddings;
    std::string labels;
    std::string split;
    std::vector<std::string> reports;
    std::string text;
    std::string method = "Text only (MLP)";
};

void run_export(const ExportArgs& a) {
    Job job("export", a.c.out, a.c.force);
    const std::string model_file = fs::is_directory(a.model) ? (fs::path(a.model) / "model.cgmlp").string() : a.model;
    for (const auto& p : {model_file, a.embeddings, a.labels, a.split}) job.input(p);
    for (const auto& r : a.reports) job.input(r);
    if (!a.text.empty()) job.input(a.text);
    job.config({{"method", a.method}});
    if (!job.begin()) {
        return;
    }
    const fs::path out = a.c.out;
    const auto model = Mlp::load(model_file);
    const auto split = RegressionSplit::load(a.split);
    const auto features = EmbeddingMatrix::load(a.embeddings);
    const auto labels = labels_of(read_labels_tsv(a.labels));
    const auto test = make_dataset(features, labels, split.target, split.test);
    export_plot_data(test.y, model.predict(test.x), out / "scatter.csv", out / "histogram.csv");
    job.output(out / "scatter.csv");
    job.output(out / "histogram.csv");
    if (!a.reports.empty()) {
        std::vector<RegressionReport> reports;
        for (const auto& r : a.reports) {
            reports.push_back(RegressionReport::from_json(read_json(r)));
        }
        write_json(out / "table.json", json::array({summary_row("Mean", reports, true), summary_row(a.method, reports)}));
        job.output(out / "table.json");
    }
    if (!a.text.empty()) {
        export_bundles_jsonl(a.text, out / "text.jsonl");
        job.output(out / "text.jsonl");
    }
    job.count("test_nodes", test.size());
    job.finish();
}

struct DiffArgs {
    Common c;
    std::string prev;
    std::string next;
};

void run_diff(const DiffArgs& a) {
    const fs::path p = a.prev;
    const fs::path n = a.next;
    Job job("diff", a.c.out, a.c.force);
    for (const auto& d : {p, n}) {
        job.input(d / "nodes.dict");
        job.input(d / "degrees.cgdeg");
    }
    if (!job.begin()) {
        return;
    }
    const auto d = snapshot_diff(SnapshotView::load(p / "nodes.dict", p / "degrees.cgdeg"),
                                 SnapshotView::load(n / "nodes.dict", n / "degrees.cgdeg"));
    const fs::path out = fs::path(a.c.out) / "diff.json";
    write_json(out, d.to_json());
    job.count("overlap", d.overlap_nodes);
    job.count("increased", d.increased);
    job.output(out);
    job.finish();
}

struct AssembleArgs {
    Common c;
    std::vector<std::string> snapshots;
};

void run_assemble(const AssembleArgs& a) {
    Job job("assemble", a.c.out, a.c.force);
    std::vector<fs::path> manifests;
    for (const auto& s : a.snapshots) {
        const fs::path p = fs::is_directory(s) ? fs::path(s) / "snapshot.json" : fs::path(s);
        manifests.push_back(p);
        job.input(p);
    }
    if (!job.begin()) {
        return;
    }
    std::vector<SnapshotManifest> snaps;
    for (const auto& m : manifests) {
        snaps.push_back(SnapshotManifest::load(m));
    }
    const auto tg = build_temporal_graph(std::move(snaps));
    const fs::path out = fs::path(a.c.out) / "temporal.json";
    tg.save(out);
    job.count("snapshots", tg.snapshots.size());
    job.count("horizon", tg.horizon());
    job.output(out);
    job.finish();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"credigraph: web-archive crawls to credibility-labelled domain graphs"};
    app.set_config("--config", "", "TOML file with option defaults; flags take precedence");
    app.require_subcommand(1);

    GenFixturesArgs gen;
    auto* s_gen = app.add_subcommand("gen-fixtures", "Write a synthetic WAT/WET corpus with ground truth");
    add_common(s_gen, gen.c, false);
    s_gen->add_option("--domains", gen.f.domains)->capture_default_str();
    s_gen->add_option("--links", gen.f.links)->capture_default_str();
    s_gen->add_option("--seed", gen.f.seed)->capture_default_str();
    s_gen->add_option("--wat-files", gen.f.wat_files)->capture_default_str();
    s_gen->add_option("--wet-files", gen.f.wet_files)->capture_default_str();
    s_gen->add_option("--threshold", gen.f.threshold, "Threshold recorded in truth.json")->capture_default_str();
    s_gen->add_option("--crawl-start", gen.f.crawl_start)->capture_default_str();

    BuildGraphArgs build;
    auto* s_build = app.add_subcommand("build-graph", "Build a domain graph from WAT files");
    add_common(s_build, build.c, true);
    s_build->add_option("--wat", build.wat, "WAT files, or directories searched for *.wat[.gz]")->required();
    s_build->add_option("--batch-size", build.batch_size, "Archive files per batch")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s_build->add_flag("--include-all-links", build.all_links, "Also take image, script and head links");
    s_build->add_option("--snapshot-id", build.snapshot_id)->capture_default_str();
    s_build->add_option("--crawl-start", build.crawl_start, "YYYY-MM-DD; defaults to the earliest record date");

    FilterArgs filter;
    auto* s_filter = app.add_subcommand("filter", "Drop nodes whose raw total degree is at most the threshold");
    add_common(s_filter, filter.c, false);
    s_filter->add_option("--graph", filter.graph, "build-graph output directory")->required();
    s_filter->add_option("--threshold", filter.threshold)->capture_default_str();
    s_filter->add_flag("--inclusive", filter.inclusive, "Keep nodes with degree equal to the threshold too");

    StatsArgs stats;
    auto* s_stats = app.add_subcommand("stats", "Structural statistics of a graph directory");
    add_common(s_stats, stats.c, false);
    s_stats->add_option("--graph", stats.graph)->required();

    ExtractTextArgs text;
    auto* s_text = app.add_subcommand("extract-text", "Per-domain text samples from WET files");
    add_common(s_text, text.c, true);
    s_text->add_option("--wet", text.wet, "WET files, or directories searched for *.wet[.gz]")->required();
    s_text->add_option("--graph", text.graph, "Graph directory whose nodes receive text")->required();
    s_text->add_option("--homepages", text.homepages, "JSON stub map for domains without documents");
    s_text->add_option("--limit", text.limit, "Merged text limit in characters")->capture_default_str();

    EmbedArgs embed;
    auto* s_embed = app.add_subcommand("embed", "Embed per-domain text");
    add_common(s_embed, embed.c, false);
    s_embed->add_option("--text", embed.text, "text.cgtxt from extract-text")->required();
    s_embed->add_option("--provider", embed.provider, "pseudo | constant")->capture_default_str();
    s_embed->add_option("--dim", embed.dim)->check(CLI::PositiveNumber)->capture_default_str();
    s_embed->add_option("--mrl", embed.mrl, "Truncated dimension (0 to skip)")->capture_default_str();
    s_embed->add_option("--seed", embed.seed)->capture_default_str();
    s_embed->add_option("--batch-size", embed.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
    s_embed->add_option("--retries", embed.retries)->capture_default_str();

    JoinLabelsArgs join;
    auto* s_join = app.add_subcommand("join-labels", "Attach rating-table scores to graph nodes");
    add_common(s_join, join.c, false);
    s_join->add_option("--dqr", join.dqr, "Rating table (CSV or TSV)")->required();
    s_join->add_option("--graph", join.graph)->required();

    SplitArgs split;
    auto* s_split = app.add_subcommand("split", "Stratified train/validation/test split");
    add_common(s_split, split.c, false);
    s_split->add_option("--labels", split.labels, "labels.tsv from join-labels")->required();
    s_split->add_option("--embeddings", split.embeddings, "Keep only nodes with a row in this file");
    s_split->add_option("--target", split.target, "pc1 | mbfc")->capture_default_str();
    s_split->add_option("--seed", split.seed)->capture_default_str();
    s_split->add_option("--ratios", split.ratios)->delimiter(',')->expected(3)->capture_default_str();

    TrainArgs train;
    auto* s_train = app.add_subcommand("train-mlp", "Train the MLP regressor and the mean baseline");
    add_common(s_train, train.c, false);
    s_train->add_option("--embeddings", train.embeddings)->required();
    s_train->add_option("--labels", train.labels)->required();
    s_train->add_option("--split", train.split)->required();
    s_train->add_option("--target", train.target, "Must match the split when given");
    s_train->add_option("--seed", train.seed)->capture_default_str();
    s_train->add_option("--max-iterations", train.max_iterations)->capture_default_str();
    s_train->add_option("--learning-rate", train.learning_rate)->capture_default_str();

    ExportArgs exp;
    auto* s_export = app.add_subcommand("export", "Plot data, results table and text export");
    add_common(s_export, exp.c, false);
    s_export->add_option("--model", exp.model, "model.cgmlp or the train-mlp output directory")->required();
    s_export->add_option("--embeddings", exp.embeddings)->required();
    s_export->add_option("--labels", exp.labels)->required();
    s_export->add_option("--split", exp.split)->required();
    s_export->add_option("--report", exp.reports, "train-mlp report.json (repeatable)");
    s_export->add_option("--text", exp.text, "text.cgtxt to export as JSON lines");
    s_export->add_option("--method", exp.method)->capture_default_str();

    DiffArgs diff;
    auto* s_diff = app.add_subcommand("diff", "Compare two snapshots");
    add_common(s_diff, diff.c, false);
    s_diff->add_option("--prev", diff.prev, "Earlier graph directory")->required();
    s_diff->add_option("--next", diff.next, "Later graph directory")->required();

    AssembleArgs assemble;
    auto* s_assemble = app.add_subcommand("assemble", "Order snapshots into a temporal graph manifest");
    add_common(s_assemble, assemble.c, false);
    s_assemble->add_option("--snapshot", assemble.snapshots, "Graph directories or snapshot.json files")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*s_gen) run_gen_fixtures(gen);
        else if (*s_build) run_build_graph(build);
        else if (*s_filter) run_filter(filter);
        else if (*s_stats) run_stats(stats);
        else if (*s_text) run_extract_text(text);
        else if (*s_embed) run_embed(embed);
        else if (*s_join) run_join_labels(join);
        else if (*s_split) run_split(split);
        else if (*s_train) run_train_mlp(train);
        else if (*s_export) run_export(exp);
        else if (*s_diff) run_diff(diff);
        else if (*s_assemble) run_assemble(assemble);
        return 0;
    } catch (const InputError& e) {
        g_log.error("input_error", {{"message", e.what()}});
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        g_log.error("internal_error", {{"message", e.what()}});
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
