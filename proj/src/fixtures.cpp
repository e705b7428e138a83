#include "credigraph/fixtures.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "credigraph/archive.hpp"
#include "credigraph/errors.hpp"
#include "credigraph/rng.hpp"

namespace credigraph {

namespace fs = std::filesystem;

nlohmann::json FixtureTruth::to_json() const {
    return {{"format", "CGTRUTH1"},
            {"nodes", nodes},
            {"edges", edges},
            {"wat_records", wat_records},
            {"anchors", anchors},
            {"rejected_links", rejected_links},
            {"self_links", self_links},
            {"wet_records", wet_records},
            {"wet_skipped", wet_skipped},
            {"domains_with_text", domains_with_text},
            {"stub_entries", stub_entries},
            {"fetch_misses", fetch_misses},
            {"label_rows", label_rows},
            {"labels_valid", labels_valid},
            {"labels_matched", labels_matched},
            {"threshold", threshold},
            {"filtered_nodes", filtered_nodes},
            {"filtered_edges", filtered_edges},
            {"mean_degree", mean_degree},
            {"density", density},
            {"wat_files", wat_files},
            {"wet_files", wet_files},
            {"dqr", dqr},
            {"homepages", homepages}};
}

std::string fixture_host(std::size_t i) {
    static constexpr const char* kPrefix[] = {"", "www.", "news.", "blog."};
    static constexpr const char* kTld[] = {"com", "org", "net", "co.uk", "de"};
    const std::size_t site = i / 4;
    return std::string(kPrefix[i % 4]) + "site" + std::to_string(site) + "." + kTld[site % 5];
}

namespace {

constexpr std::size_t kPagesPerDomain = 4;

std::string reverse_host(const std::string& host) {
    std::vector<std::string> labels;
    std::size_t start = 0;
    while (true) {
        const auto dot = host.find('.', start);
        labels.push_back(host.substr(start, dot - start));
        if (dot == std::string::npos) {
            break;
        }
        start = dot + 1;
    }
    std::string out;
    for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
        if (!out.empty()) {
            out += '.';
        }
        out += *it;
    }
    return out;
}

// Same host, written the way crawled URLs often are: mixed case, explicit
// default port, trailing dot.
std::string noisy_url(const std::string& host, const std::string& path, SplitMix64& rng) {
    std::string h = host;
    if (rng.below(4) == 0) {
        for (auto& c : h) {
            if (rng.below(2) == 0) {
                c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            }
        }
    }
    const bool https = rng.below(2) == 0;
    std::string url = https ? "https://" : "http://";
    url += h;
    switch (rng.below(8)) {
        case 0: url += https ? ":443" : ":80"; break;
        case 1: url += "."; break;
        default: break;
    }
    return url + path;
}

const char* const kWords[] = {"credibility", "news",    "report", "source", "domain", "archive", "media",  "fact",
                              "check",       "analysis", "web",    "graph",  "daten",  "über",    "café",   "naïve",
                              "signal",      "policy",  "local",  "world",  "market", "science", "health", "sport"};

std::string random_text(std::size_t approx_len, SplitMix64& rng) {
    std::string out;
    while (out.size() < approx_len) {
        if (!out.empty()) {
            out += rng.below(12) == 0 ? ".\n" : " ";
        }
        out += kWords[rng.below(std::size(kWords))];
    }
    return out;
}

WarcRecord make_record(std::string type, const std::string& uri, Timestamp date, std::string content_type,
                       std::string payload, std::uint64_t id) {
    WarcRecord r;
    char rid[64];
    std::snprintf(rid, sizeof rid, "<urn:uuid:00000000-0000-4000-8000-%012llx>",
                  static_cast<unsigned long long>(id & 0xFFFFFFFFFFFFULL));
    r.headers.emplace_back("WARC-Type", std::move(type));
    if (!uri.empty()) {
        r.headers.emplace_back("WARC-Target-URI", uri);
    }
    r.headers.emplace_back("WARC-Date", format_timestamp(date));
    r.headers.emplace_back("WARC-Record-ID", rid);
    r.headers.emplace_back("Content-Type", std::move(content_type));
    r.payload = std::move(payload);
    return r;
}

WarcRecord warcinfo(const std::string& filename, Timestamp date, std::uint64_t id) {
    auto r = make_record("warcinfo", "", date, "application/warc-fields",
                         "software: credigraph-fixtures\r\nformat: WARC File Format 1.1\r\n", id);
    r.headers.emplace_back("WARC-Filename", filename);
    return r;
}

std::string format_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

FixtureTruth generate_fixtures(const fs::path& dir, const FixtureOptions& opt) {
    if (opt.domains < 2) {
        throw ParameterError("fixtures need at least 2 domains");
    }
    if (opt.wat_files == 0 || opt.wet_files == 0) {
        throw ParameterError("fixtures need at least one WAT and one WET file");
    }
    fs::create_directories(dir / "wat");
    fs::create_directories(dir / "wet");
    SplitMix64 link_rng(mix_seed(opt.seed, 11));
    SplitMix64 text_rng(mix_seed(opt.seed, 12));
    SplitMix64 label_rng(mix_seed(opt.seed, 13));
    SplitMix64 noise_rng(mix_seed(opt.seed, 14));
    const Timestamp t0 = parse_timestamp(opt.crawl_start);
    const std::size_t n = opt.domains;
    FixtureTruth truth;
    truth.threshold = opt.threshold;
    truth.nodes = n;

    // Most traffic stays among a core; the periphery gets a handful of links
    // so degree filtering has something to remove.
    const std::size_t core = std::max<std::size_t>(1, n * 7 / 10);
    const auto pick_domain = [&](SplitMix64& rng) -> std::size_t {
        if (core == n || rng.below(100) != 0) {
            return rng.below(core);
        }
        return core + rng.below(n - core);
    };

    struct Anchor {
        std::string url;
    };
    std::map<std::pair<std::size_t, std::size_t>, std::vector<Anchor>> pages;
    for (std::size_t d = 0; d < n; ++d) {
        pages[{d, 0}];
    }
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t l = 0; l < opt.links; ++l) {
        const std::size_t src = pick_domain(link_rng);
        const std::size_t page = link_rng.below(kPagesPerDomain);
        auto& anchors = pages[{src, page}];
        const double u = link_rng.uniform();
        std::string url;
        if (u < 0.04) {
            url = "http://10." + std::to_string(link_rng.below(256)) + "." + std::to_string(link_rng.below(256)) +
                  ".1/admin";
            ++truth.rejected_links;
        } else if (u < 0.07) {
            url = "http://intranet/home";
            ++truth.rejected_links;
        } else if (u < 0.12) {
            url = link_rng.below(2) == 0 ? "/about.html" : "../up/" + std::to_string(l) + ".html";
            ++truth.self_links;
        } else if (u < 0.17) {
            url = noisy_url(fixture_host(src), "/same/" + std::to_string(l), link_rng);
            ++truth.self_links;
        } else {
            const std::size_t dst = pick_domain(link_rng);
            url = noisy_url(fixture_host(dst), "/a/" + std::to_string(l) + "?ref=1#top", link_rng);
            if (dst == src) {
                ++truth.self_links;
            } else {
                edges.emplace(src, dst);
            }
        }
        anchors.push_back({std::move(url)});
    }
    truth.anchors = opt.links;
    truth.edges = edges.size();
    truth.mean_degree = 2.0 * static_cast<double>(truth.edges) / static_cast<double>(n);
    truth.density = 2.0 * static_cast<double>(truth.edges) / (static_cast<double>(n) * static_cast<double>(n - 1));

    std::vector<std::uint64_t> degree(n, 0);
    for (const auto& [s, d] : edges) {
        ++degree[s];
        ++degree[d];
    }
    for (std::size_t d = 0; d < n; ++d) {
        truth.filtered_nodes += degree[d] > opt.threshold;
    }
    for (const auto& [s, d] : edges) {
        truth.filtered_edges += degree[s] > opt.threshold && degree[d] > opt.threshold;
    }

    // WAT: one metadata record per page, spread round-robin over the files.
    std::uint64_t record_id = opt.seed << 32;
    std::vector<std::unique_ptr<ArchiveWriter>> wat;
    for (std::size_t f = 0; f < opt.wat_files; ++f) {
        char name[64];
        std::snprintf(name, sizeof name, "part-%05zu.warc.wat.gz", f);
        truth.wat_files.push_back((dir / "wat" / name).string());
        wat.push_back(std::make_unique<ArchiveWriter>(dir / "wat" / name, true));
        wat.back()->write(warcinfo(name, t0, ++record_id));
    }
    std::size_t next_file = 0;
    for (const auto& [key, anchors] : pages) {
        const auto [d, p] = key;
        const std::string page_url = "https://" + fixture_host(d) + "/p" + std::to_string(p) + ".html";
        nlohmann::json links = nlohmann::json::array();
        for (const auto& a : anchors) {
            links.push_back({{"path", "A@/href"}, {"url", a.url}, {"text", "link"}});
        }
        if (noise_rng.below(2) == 0) {
            links.push_back({{"path", "IMG@/src"}, {"url", "/img/logo.png"}});
        }
        nlohmann::json doc{
            {"Container", {{"Filename", "fixture"}, {"Compressed", true}}},
            {"Envelope",
             {{"Format", "WARC"},
              {"WARC-Header-Metadata", {{"WARC-Type", "response"}, {"WARC-Target-URI", page_url}}},
              {"Payload-Metadata",
               {{"HTTP-Response-Metadata",
                 {{"Response-Message", {{"Status", "200"}}},
                  {"HTML-Metadata",
                   {{"Head", {{"Title", fixture_host(d)}, {"Link", {{{"path", "LINK@/href"}, {"url", "/style.css"}}}}}},
                    {"Links", links}}}}}}}}}};
        const Timestamp ts = t0 + std::chrono::seconds(noise_rng.below(28 * 86400));
        wat[next_file]->write(make_record("metadata", page_url, ts, "application/json", doc.dump(), ++record_id));
        next_file = (next_file + 1) % wat.size();
        ++truth.wat_records;
    }
    for (auto& w : wat) {
        w->close();
    }

    // WET: documents for a share of the domains, a few with unusable hosts.
    std::vector<std::unique_ptr<ArchiveWriter>> wet;
    for (std::size_t f = 0; f < opt.wet_files; ++f) {
        char name[64];
        std::snprintf(name, sizeof name, "part-%05zu.warc.wet.gz", f);
        truth.wet_files.push_back((dir / "wet" / name).string());
        wet.push_back(std::make_unique<ArchiveWriter>(dir / "wet" / name, true));
        wet.back()->write(warcinfo(name, t0, ++record_id));
    }
    const auto write_doc = [&](const std::string& url) {
        const std::size_t len = 20 + text_rng.below(3000);
        auto r = make_record("conversion", url, t0 + std::chrono::seconds(text_rng.below(28 * 86400)), "text/plain",
                             random_text(len, text_rng), ++record_id);
        r.headers.emplace_back("WARC-Identified-Content-Language", text_rng.below(3) == 0 ? "eng,deu" : "eng");
        wet[next_file % wet.size()]->write(r);
        ++next_file;
        ++truth.wet_records;
    };
    next_file = 0;
    std::vector<bool> has_text(n, false);
    for (std::size_t d = 0; d < n; ++d) {
        if (text_rng.uniform() >= opt.text_coverage) {
            continue;
        }
        has_text[d] = true;
        ++truth.domains_with_text;
        const std::size_t docs = 1 + text_rng.below(9);
        for (std::size_t j = 0; j < docs; ++j) {
            write_doc("https://" + fixture_host(d) + "/doc" + std::to_string(j));
        }
    }
    for (std::size_t k = 0; k < 5; ++k) {
        write_doc("http://192.168.0." + std::to_string(k + 1) + "/index.html");
        ++truth.wet_skipped;
    }
    for (auto& w : wet) {
        w->close();
    }

    nlohmann::json stub = nlohmann::json::object();
    for (std::size_t d = 0; d < n; ++d) {
        if (has_text[d]) {
            continue;
        }
        if (text_rng.uniform() < opt.stub_coverage) {
            stub[reverse_host(fixture_host(d))] = "Welcome to " + fixture_host(d) + ". " + random_text(200, text_rng);
            ++truth.stub_entries;
        } else {
            ++truth.fetch_misses;
        }
    }
    truth.homepages = (dir / "homepages.json").string();
    std::ofstream(truth.homepages) << stub.dump(2) << '\n';

    // Rating table: rated graph domains, some unknown domains, a few
    // duplicates (the later row wins) and out-of-range rows.
    truth.dqr = (dir / "dqr.csv").string();
    std::ofstream dqr(truth.dqr);
    dqr << "domain,pc1,mbfc,source\n";
    std::vector<std::size_t> rated;
    for (std::size_t d = 0; d < n; ++d) {
        if (label_rng.uniform() < opt.label_coverage) {
            rated.push_back(d);
            const double pc1 = label_rng.uniform();
            const bool has_mbfc = label_rng.below(10) != 0;
            dqr << fixture_host(d) << ',' << format_score(pc1) << ','
                << (has_mbfc ? format_score(label_rng.uniform()) : "") << ",fixture\n";
            ++truth.label_rows;
        }
    }
    for (std::size_t k = 0; k < 3 && k < rated.size(); ++k) {
        dqr << fixture_host(rated[k]) << ',' << format_score(label_rng.uniform()) << ','
            << format_score(label_rng.uniform()) << ",\"fixture, revised\"\n";
        ++truth.label_rows;
    }
    for (std::size_t k = 0; k < 10; ++k) {
        dqr << "unrated" << k << ".example.net," << format_score(label_rng.uniform()) << ",,fixture\n";
        ++truth.label_rows;
    }
    for (std::size_t k = 0; k < 2; ++k) {
        dqr << "badscore" << k << ".example.net,1.5,0.5,fixture\n";
        ++truth.label_rows;
    }
    truth.labels_matched = rated.size();
    truth.labels_valid = rated.size() + 10;
    dqr.close();

    std::ofstream(dir / "truth.json") << truth.to_json().dump(2) << '\n';
    return truth;
}

}  // namespace credigraph
