#include "credigraph/graph_build.hpp"

#include <charconv>
#include <fstream>

namespace credigraph {
namespace {

constexpr std::string_view kBatchVersion = "CGBATCH1";

std::uint64_t parse_section(const std::string& line, char tag, const std::filesystem::path& file) {
    std::uint64_t n = 0;
    if (line.size() < 3 || line[0] != tag || line[1] != ' ') {
        throw FormatError("batch file `" + file.string() + "`: expected `" + std::string(1, tag) +
                          " <count>`, got `" + line.substr(0, 40) + "`");
    }
    auto [ptr, ec] = std::from_chars(line.data() + 2, line.data() + line.size(), n);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
        throw FormatError("batch file `" + file.string() + "`: bad section count");
    }
    return n;
}

std::ifstream open_batch(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw IoError("cannot open batch file `" + file.string() + "`");
    }
    std::string line;
    if (!std::getline(in, line) || line != kBatchVersion) {
        throw FormatError("`" + file.string() + "` is not a " + std::string(kBatchVersion) +
                          " file (bad or missing version header)");
    }
    return in;
}

class BatchDomainSource final : public RecordSource<std::string> {
   public:
    explicit BatchDomainSource(std::filesystem::path file) : file_(std::move(file)), in_(open_batch(file_)) {
        std::string line;
        std::getline(in_, line);
        remaining_ = parse_section(line, 'D', file_);
    }

    std::optional<std::string> next() override {
        if (remaining_ == 0) {
            return std::nullopt;
        }
        std::string key;
        if (!std::getline(in_, key)) {
            throw FormatError("batch file `" + file_.string() + "`: truncated domain section");
        }
        if (!last_.empty() && !(last_ < key)) {
            throw FormatError("batch file `" + file_.string() + "`: domains not sorted/unique");
        }
        last_ = key;
        --remaining_;
        return key;
    }

   private:
    std::filesystem::path file_;
    std::ifstream in_;
    std::uint64_t remaining_ = 0;
    std::string last_;
};

using KeyPair = std::pair<std::string, std::string>;

class BatchEdgeSource final : public RecordSource<KeyPair> {
   public:
    explicit BatchEdgeSource(std::filesystem::path file) : file_(std::move(file)), in_(open_batch(file_)) {
        std::string line;
        std::getline(in_, line);
        std::uint64_t domains = parse_section(line, 'D', file_);
        while (domains-- > 0) {
            if (!std::getline(in_, line)) {
                throw FormatError("batch file `" + file_.string() + "`: truncated domain section");
            }
        }
        if (!std::getline(in_, line)) {
            throw FormatError("batch file `" + file_.string() + "`: missing edge section");
        }
        remaining_ = parse_section(line, 'E', file_);
    }

    std::optional<KeyPair> next() override {
        if (remaining_ == 0) {
            return std::nullopt;
        }
        std::string line;
        if (!std::getline(in_, line)) {
            throw FormatError("batch file `" + file_.string() + "`: truncated edge section");
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw FormatError("batch file `" + file_.string() + "`: edge line without TAB");
        }
        KeyPair pair{line.substr(0, tab), line.substr(tab + 1)};
        if (have_last_ && !(last_ < pair)) {
            throw FormatError("batch file `" + file_.string() + "`: edges not sorted/unique");
        }
        last_ = pair;
        have_last_ = true;
        --remaining_;
        return pair;
    }

   private:
    std::filesystem::path file_;
    std::ifstream in_;
    std::uint64_t remaining_ = 0;
    KeyPair last_;
    bool have_last_ = false;
};

// Walks the dictionary forward to `key`. Keys arrive in ascending order.
class DictionaryCursor {
   public:
    explicit DictionaryCursor(const std::filesystem::path& path) : reader_(path) {}

    NodeId seek(const std::string& key) {
        while (!current_ || *current_ < key) {
            current_ = reader_.next();
            if (!current_) {
                throw FormatError("edge endpoint `" + key + "` missing from the merged domain set");
            }
            id_ = reader_.position() - 1;
        }
        if (*current_ != key) {
            throw FormatError("edge endpoint `" + key + "` missing from the merged domain set");
        }
        return id_;
    }

   private:
    DictionaryReader reader_;
    std::optional<std::string> current_;
    NodeId id_ = 0;
};

}  // namespace

struct BatchGraphBuilder::Impl {
    Impl(std::filesystem::path dir, SortOptions options)
        : scratch(std::move(dir)),
          domains(scratch, with_unique(options)),
          edges(scratch, with_unique(options)) {}

    static SortOptions with_unique(SortOptions o) {
        o.unique = true;
        o.memory_budget_bytes = std::max<std::size_t>(o.memory_budget_bytes / 2, 1);
        return o;
    }

    std::filesystem::path scratch;
    ExternalSorter<std::string, StringCodec> domains;
    // "src<TAB>dst": TAB sorts below every host character, so line order is
    // (src, dst) order.
    ExternalSorter<std::string, StringCodec> edges;
    BatchStats stats;
    bool written = false;
};

BatchGraphBuilder::BatchGraphBuilder(std::filesystem::path scratch, SortOptions options)
    : impl_(std::make_unique<Impl>(std::move(scratch), options)) {}

BatchGraphBuilder::~BatchGraphBuilder() = default;

void BatchGraphBuilder::add_page(std::string_view url) {
    ++impl_->stats.pages;
    auto host = normalize_host(url);
    if (!host) {
        ++impl_->stats.rejected_hosts;
        return;
    }
    impl_->domains.add(host.key->str());
}

void BatchGraphBuilder::add_link(const PageLink& link) {
    ++impl_->stats.links;
    auto src = normalize_host(link.source_url);
    auto dst = normalize_host(link.target_url);
    if (!src || !dst) {
        ++impl_->stats.rejected_hosts;
        if (src) {
            impl_->domains.add(src.key->str());
        }
        return;
    }
    impl_->domains.add(src.key->str());
    impl_->domains.add(dst.key->str());
    if (*src.key == *dst.key) {
        ++impl_->stats.self_links;
        return;
    }
    std::string line = src.key->str();
    line.push_back('\t');
    line.append(dst.key->str());
    impl_->edges.add(std::move(line));
}

BatchStats BatchGraphBuilder::write(const std::filesystem::path& batch_file) {
    if (impl_->written) {
        throw ParameterError("batch builder already written");
    }
    impl_->written = true;
    const auto tmp = batch_file.string() + ".tmp";
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) {
        throw IoError("cannot create batch file `" + tmp + "`");
    }
    // Counts precede the sections, so stage each section in a scratch file.
    const auto stage = [&](ExternalSorter<std::string, StringCodec>& sorter, const std::string& name,
                           std::uint64_t& count) {
        const auto path = impl_->scratch / (batch_file.filename().string() + "." + name);
        std::ofstream staged(path, std::ios::trunc);
        auto source = sorter.finish();
        while (auto v = source->next()) {
            staged << *v << '\n';
            ++count;
        }
        staged.close();
        if (!staged) {
            throw IoError("write failed on `" + path.string() + "`");
        }
        return path;
    };
    const auto domain_path = stage(impl_->domains, "domains", impl_->stats.domains);
    const auto edge_path = stage(impl_->edges, "edges", impl_->stats.edges);
    out << kBatchVersion << '\n' << "D " << impl_->stats.domains << '\n';
    {
        std::ifstream in(domain_path);
        if (impl_->stats.domains > 0) out << in.rdbuf();
    }
    out << "E " << impl_->stats.edges << '\n';
    {
        std::ifstream in(edge_path);
        if (impl_->stats.edges > 0) out << in.rdbuf();
    }
    out.close();
    if (!out) {
        throw IoError("write failed on batch file `" + tmp + "`");
    }
    std::error_code ec;
    std::filesystem::remove(domain_path, ec);
    std::filesystem::remove(edge_path, ec);
    std::filesystem::rename(tmp, batch_file);
    return impl_->stats;
}

BatchStats build_batch_graph(const std::vector<PageLink>& links, const std::filesystem::path& batch_file,
                             const std::filesystem::path& scratch, SortOptions options) {
    BatchGraphBuilder builder(scratch, options);
    for (const auto& link : links) {
        builder.add_link(link);
    }
    return builder.write(batch_file);
}

std::unique_ptr<RecordSource<std::string>> open_batch_domains(const std::filesystem::path& batch_file) {
    return std::make_unique<BatchDomainSource>(batch_file);
}

std::unique_ptr<RecordSource<KeyPair>> open_batch_edges(const std::filesystem::path& batch_file) {
    return std::make_unique<BatchEdgeSource>(batch_file);
}

MergeResult merge_batches(const std::vector<std::filesystem::path>& batch_files, const MergeOutputs& outputs,
                          const std::filesystem::path& scratch, SortOptions options) {
    if (batch_files.empty()) {
        throw ParameterError("merge_batches needs at least one batch file");
    }
    MergeResult result;
    options.unique = true;

    // 1. Domain union -> dictionary (ids = lexicographic rank).
    {
        std::vector<std::unique_ptr<RecordSource<std::string>>> sources;
        for (const auto& f : batch_files) {
            sources.push_back(open_batch_domains(f));
        }
        KWayMerge<std::string> merged(std::move(sources), /*unique=*/true);
        std::ofstream dict(outputs.dictionary, std::ios::trunc);
        if (!dict) {
            throw IoError("cannot create dictionary `" + outputs.dictionary.string() + "`");
        }
        dict << kDictionaryHeader << '\n';
        while (auto key = merged.next()) {
            dict << *key << '\n';
            ++result.nodes;
        }
        dict.close();
        if (!dict) {
            throw IoError("write failed on dictionary `" + outputs.dictionary.string() + "`");
        }
    }

    // 2. Edge union, sorted by src key: join src ids, re-sort by dst key.
    ExternalSorter<KeyIdPair, KeyIdCodec> by_dst(scratch, options);
    {
        std::vector<std::unique_ptr<RecordSource<KeyPair>>> sources;
        for (const auto& f : batch_files) {
            sources.push_back(open_batch_edges(f));
        }
        KWayMerge<KeyPair> merged(std::move(sources), /*unique=*/true);
        DictionaryCursor cursor(outputs.dictionary);
        while (auto e = merged.next()) {
            const NodeId src = cursor.seek(e->first);
            by_dst.add(KeyIdPair{std::move(e->second), src});
        }
    }

    // 3. Join dst ids and sort the id pairs.
    ExternalSorter<IdPair, IdPairCodec> by_ids(scratch, options);
    {
        auto sorted = by_dst.finish();
        DictionaryCursor cursor(outputs.dictionary);
        while (auto e = sorted->next()) {
            const NodeId dst = cursor.seek(e->first);
            by_ids.add(IdPair{e->second, dst});
        }
    }

    // 4. Emit.
    EdgeWriter writer(outputs.edges);
    auto sorted = by_ids.finish();
    while (auto e = sorted->next()) {
        writer.write(Edge{e->first, e->second});
    }
    writer.close();
    result.edges = writer.count();
    return result;
}

}  // namespace credigraph
