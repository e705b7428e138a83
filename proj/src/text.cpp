#include "credigraph/text.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "credigraph/utf8.hpp"

namespace credigraph {

// ---------------------------------------------------------------------------
// Sampling

bool RepresentativeSampler::before(const Ranked& a, const Ranked& b) {
    if (a.doc.text_length != b.doc.text_length) return a.doc.text_length > b.doc.text_length;
    if (a.doc.url != b.doc.url) return a.doc.url < b.doc.url;
    if (a.doc.fetch_time != b.doc.fetch_time) return a.doc.fetch_time < b.doc.fetch_time;
    if (a.doc.text != b.doc.text) return a.doc.text < b.doc.text;
    return a.seq < b.seq;
}

void RepresentativeSampler::add(KeptDocument doc) {
    Ranked r{std::move(doc), seen_++};
    const auto insert_bounded = [](std::vector<Ranked>& v, const Ranked& item, std::size_t cap, bool keep_front) {
        const auto pos = std::lower_bound(v.begin(), v.end(), item, before);
        v.insert(pos, item);
        if (v.size() > cap) {
            if (keep_front) {
                v.pop_back();
            } else {
                v.erase(v.begin());
            }
        }
    };
    insert_bounded(head_, r, kKeepLongest, true);
    insert_bounded(tail_, r, kKeepShortest, false);
}

std::vector<KeptDocument> RepresentativeSampler::kept() const {
    std::vector<Ranked> all = head_;
    for (const auto& t : tail_) {
        const bool dup = std::any_of(all.begin(), all.end(), [&](const Ranked& h) { return h.seq == t.seq; });
        if (!dup) {
            all.push_back(t);
        }
    }
    std::sort(all.begin(), all.end(), before);
    std::vector<KeptDocument> out;
    out.reserve(all.size());
    const std::size_t longest = std::min(kKeepLongest, all.size());
    for (std::size_t i = 0; i < longest; ++i) {
        out.push_back(all[i].doc);
    }
    for (std::size_t i = all.size(); i > longest; --i) {
        out.push_back(all[i - 1].doc);
    }
    return out;
}

std::string merge_documents(const std::vector<KeptDocument>& kept, std::size_t limit) {
    std::string merged;
    for (const auto& d : kept) {
        if (!merged.empty()) {
            merged += "\n\n";
        }
        merged += '[';
        merged += format_timestamp(d.fetch_time);
        merged += "] ";
        merged += d.text;
    }
    if (utf8::length(merged) > limit) {
        merged.resize(utf8::truncate(merged, limit).size());
    }
    return merged;
}

DomainTextBundle sample_representative(const NodeKey& node, const std::vector<KeptDocument>& group,
                                       std::size_t limit) {
    RepresentativeSampler sampler;
    for (const auto& d : group) {
        sampler.add(d);
    }
    DomainTextBundle b;
    b.node = node;
    b.documents_kept = sampler.kept();
    b.merged_text = merge_documents(b.documents_kept, limit);
    b.total_documents_seen = sampler.seen();
    b.truncation_limit = limit;
    return b;
}

// ---------------------------------------------------------------------------
// Grouping

namespace {

struct KeyedDocument {
    std::string key;
    KeptDocument doc;

    friend bool operator<(const KeyedDocument& a, const KeyedDocument& b) {
        if (a.key != b.key) return a.key < b.key;
        if (a.doc.url != b.doc.url) return a.doc.url < b.doc.url;
        if (a.doc.fetch_time != b.doc.fetch_time) return a.doc.fetch_time < b.doc.fetch_time;
        return a.doc.text < b.doc.text;
    }
};

struct KeyedDocumentCodec {
    static void write(std::ostream& out, const KeyedDocument& d) {
        io::write_string(out, d.key);
        io::write_string(out, d.doc.url);
        io::write_le<std::int64_t>(out, d.doc.fetch_time.time_since_epoch().count());
        io::write_le<std::uint64_t>(out, d.doc.text_length);
        io::write_string(out, d.doc.text);
    }
    static bool read(std::istream& in, KeyedDocument& d) {
        if (!io::try_read_string(in, d.key)) {
            return false;
        }
        d.doc.url = io::read_string(in);
        d.doc.fetch_time = Timestamp{std::chrono::seconds{io::read_le<std::int64_t>(in, "fetch time")}};
        d.doc.text_length = static_cast<std::size_t>(io::read_le<std::uint64_t>(in, "text length"));
        d.doc.text = io::read_string(in);
        return true;
    }
    static std::size_t bytes(const KeyedDocument& d) {
        return d.key.size() + d.doc.url.size() + d.doc.text.size() + sizeof(KeyedDocument);
    }
};

}  // namespace

struct DocumentGrouper::Impl {
    Impl(std::filesystem::path scratch, SortOptions options) : sorter(std::move(scratch), options) {}
    ExternalSorter<KeyedDocument, KeyedDocumentCodec> sorter;
};

DocumentGrouper::DocumentGrouper(std::filesystem::path scratch, SortOptions options)
    : impl_(std::make_unique<Impl>(std::move(scratch), options)) {}

DocumentGrouper::~DocumentGrouper() = default;

bool DocumentGrouper::add(const WetDocument& doc) {
    auto host = normalize_host(doc.url);
    if (!host) {
        ++skipped_;
        return false;
    }
    impl_->sorter.add(KeyedDocument{host.key->str(), KeptDocument{doc.url, doc.fetch_time, doc.text, doc.text_length}});
    ++added_;
    return true;
}

void DocumentGrouper::for_each_bundle(std::size_t limit, const std::function<void(DomainTextBundle&&)>& sink) {
    auto sorted = impl_->sorter.finish();
    std::optional<std::string> current;
    RepresentativeSampler sampler;
    const auto flush = [&] {
        if (!current) {
            return;
        }
        DomainTextBundle b;
        b.node = *NodeKey::from_reversed(*current);
        b.documents_kept = sampler.kept();
        b.merged_text = merge_documents(b.documents_kept, limit);
        b.total_documents_seen = sampler.seen();
        b.truncation_limit = limit;
        sink(std::move(b));
        sampler = RepresentativeSampler{};
    };
    while (auto d = sorted->next()) {
        if (!current || *current != d->key) {
            flush();
            current = d->key;
        }
        sampler.add(std::move(d->doc));
    }
    flush();
}

// ---------------------------------------------------------------------------
// Homepage fallback

StubFetcher::StubFetcher(std::map<std::string, std::string> pages, Timestamp fetch_time)
    : pages_(std::move(pages)), fetch_time_(fetch_time) {}

StubFetcher StubFetcher::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open stub fetch map `" + path.string() + "`");
    }
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw FormatError("stub fetch map `" + path.string() + "` must be a JSON object");
    }
    std::map<std::string, std::string> pages;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_string()) {
            throw FormatError("stub fetch map value for `" + k + "` is not a string");
        }
        pages[k] = v.get<std::string>();
    }
    return StubFetcher(std::move(pages));
}

FetchOutcome StubFetcher::fetch(const NodeKey& domain) {
    FetchOutcome out;
    const auto it = pages_.find(domain.str());
    if (it == pages_.end()) {
        out.status = FetchOutcome::Status::kAbsent;
        return out;
    }
    out.status = FetchOutcome::Status::kOk;
    out.url = "https://" + domain.host() + "/";
    out.fetch_time = fetch_time_;
    out.text = it->second;
    return out;
}

FetchResult fetch_missing(const std::vector<NodeKey>& domains, HomepageFetcher& fetcher,
                          const FetchOptions& options) {
    std::vector<FetchOutcome> outcomes(domains.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < domains.size(); i = next++) {
            try {
                outcomes[i] = fetcher.fetch(domains[i]);
            } catch (const std::exception& e) {
                outcomes[i].status = FetchOutcome::Status::kError;
                outcomes[i].error = e.what();
            }
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(options.max_in_flight, 1), domains.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }
    FetchResult result;
    for (std::size_t i = 0; i < domains.size(); ++i) {
        auto& o = outcomes[i];
        if (o.status != FetchOutcome::Status::kOk) {
            result.misses.push_back(FetchMiss{domains[i], o.status, o.error});
            continue;
        }
        const auto text = utf8::decode_lossy(o.text);
        const std::size_t len = utf8::length(text);
        result.bundles.push_back(
            sample_representative(domains[i], {KeptDocument{o.url, o.fetch_time, text, len}}, options.limit));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Store

BundleWriter::BundleWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
        throw IoError("cannot create bundle store `" + path.string() + "`");
    }
    io::write_magic(out_, kTextMagic);
}

void BundleWriter::write(const DomainTextBundle& b) {
    std::ostringstream body;
    io::write_string(body, b.node.str());
    io::write_le<std::uint64_t>(body, b.total_documents_seen);
    io::write_le<std::uint32_t>(body, static_cast<std::uint32_t>(b.documents_kept.size()));
    for (const auto& d : b.documents_kept) {
        io::write_string(body, d.url);
        io::write_string(body, format_timestamp(d.fetch_time));
        io::write_le<std::uint64_t>(body, d.text_length);
    }
    io::write_string(body, b.merged_text);
    const std::string bytes = body.str();
    io::write_le<std::uint64_t>(out_, bytes.size());
    out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    ++count_;
}

void BundleWriter::close() {
    out_.close();
    if (!out_) {
        throw IoError("write failed on bundle store");
    }
}

BundleReader::BundleReader(const std::filesystem::path& path) : in_(path, std::ios::binary), file_(path.string()) {
    if (!in_) {
        throw IoError("cannot open bundle store `" + file_ + "`");
    }
    io::expect_magic(in_, kTextMagic, file_);
}

std::optional<DomainTextBundle> BundleReader::next() {
    std::uint64_t size = 0;
    if (!io::try_read_le(in_, size)) {
        return std::nullopt;
    }
    std::string bytes(size, '\0');
    in_.read(bytes.data(), static_cast<std::streamsize>(size));
    if (static_cast<std::uint64_t>(in_.gcount()) != size) {
        throw FormatError("truncated record in bundle store `" + file_ + "`");
    }
    std::istringstream body(bytes);
    DomainTextBundle b;
    const std::string key = io::read_string(body);
    auto node = NodeKey::from_reversed(key);
    if (!node) {
        throw FormatError("invalid node key `" + key + "` in bundle store");
    }
    b.node = *node;
    b.total_documents_seen = io::read_le<std::uint64_t>(body, "document count");
    const auto kept = io::read_le<std::uint32_t>(body, "kept count");
    for (std::uint32_t i = 0; i < kept; ++i) {
        KeptDocument d;
        d.url = io::read_string(body);
        d.fetch_time = parse_timestamp(io::read_string(body));
        d.text_length = static_cast<std::size_t>(io::read_le<std::uint64_t>(body, "text length"));
        b.documents_kept.push_back(std::move(d));
    }
    b.merged_text = io::read_string(body);
    return b;
}

void export_bundles_jsonl(const std::filesystem::path& store, const std::filesystem::path& jsonl) {
    BundleReader reader(store);
    std::ofstream out(jsonl, std::ios::trunc);
    if (!out) {
        throw IoError("cannot create `" + jsonl.string() + "`");
    }
    while (auto b = reader.next()) {
        nlohmann::json docs = nlohmann::json::array();
        for (const auto& d : b->documents_kept) {
            docs.push_back({{"url", d.url}, {"fetch_time", format_timestamp(d.fetch_time)}, {"text_length", d.text_length}});
        }
        const nlohmann::json line{{"node", b->node.str()},
                                  {"total_documents_seen", b->total_documents_seen},
                                  {"documents", docs},
                                  {"text", b->merged_text}};
        out << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    }
}

}  // namespace credigraph
