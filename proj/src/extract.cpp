#include "credigraph/extract.hpp"

#include <nlohmann/json.hpp>

#include "credigraph/url.hpp"
#include "credigraph/utf8.hpp"

namespace credigraph {
namespace {

using nlohmann::json;

const json* walk(const json& root, std::initializer_list<const char*> path) {
    const json* node = &root;
    for (const char* key : path) {
        if (!node->is_object()) {
            return nullptr;
        }
        const auto it = node->find(key);
        if (it == node->end()) {
            return nullptr;
        }
        node = &*it;
    }
    return node;
}

bool is_anchor(const json& entry) {
    const auto it = entry.find("path");
    if (it == entry.end() || !it->is_string()) {
        return false;
    }
    const auto& path = it->get_ref<const std::string&>();
    return path.starts_with("A@/href");
}

void collect(const json* links, bool anchors_only, const std::string& page,
             std::vector<PageLink>& out) {
    if (links == nullptr || !links->is_array()) {
        return;
    }
    for (const auto& entry : *links) {
        if (!entry.is_object()) {
            continue;
        }
        if (anchors_only && !is_anchor(entry)) {
            continue;
        }
        const auto url = entry.find("url");
        if (url == entry.end() || !url->is_string()) {
            continue;
        }
        if (auto target = resolve_url(page, url->get_ref<const std::string&>())) {
            out.push_back(PageLink{page, std::move(*target)});
        }
    }
}

json parse_payload(const WarcRecord& record) {
    // The WAT payload is a single JSON object, sometimes followed by CRLF.
    json doc = json::parse(record.payload, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw FormatError("WAT payload is not a JSON object");
    }
    return doc;
}

}  // namespace

std::optional<std::string> wat_page_uri(const WarcRecord& record) {
    if (record.target_uri) {
        return record.target_uri;
    }
    const json doc = parse_payload(record);
    if (const json* uri = walk(doc, {"Envelope", "WARC-Header-Metadata", "WARC-Target-URI"});
        uri != nullptr && uri->is_string()) {
        return uri->get<std::string>();
    }
    return std::nullopt;
}

std::vector<PageLink> extract_wat_links(const WarcRecord& record, const LinkOptions& options) {
    const json doc = parse_payload(record);
    std::optional<std::string> page = record.target_uri;
    if (!page) {
        if (const json* uri = walk(doc, {"Envelope", "WARC-Header-Metadata", "WARC-Target-URI"});
            uri != nullptr && uri->is_string()) {
            page = uri->get<std::string>();
        }
    }
    std::vector<PageLink> links;
    if (!page) {
        return links;
    }
    const json* html = walk(doc, {"Envelope", "Payload-Metadata", "HTTP-Response-Metadata", "HTML-Metadata"});
    if (html == nullptr) {
        return links;
    }
    collect(walk(*html, {"Links"}), !options.include_all_links, *page, links);
    if (options.include_all_links) {
        collect(walk(*html, {"Head", "Link"}), false, *page, links);
    }
    return links;
}

WetDocument extract_wet_document(const WarcRecord& record) {
    if (!record.target_uri || record.target_uri->empty()) {
        throw RecordRejected("conversion record without WARC-Target-URI");
    }
    WetDocument doc;
    doc.url = *record.target_uri;
    doc.fetch_time = record.date;
    if (const std::string* langs = record.header("WARC-Identified-Content-Language")) {
        std::string_view rest = *langs;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            std::string_view item = rest.substr(0, comma);
            while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
            while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
            if (!item.empty()) {
                doc.languages.emplace_back(item);
            }
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
    }
    doc.text = utf8::decode_lossy(record.payload);
    doc.text_length = utf8::length(doc.text);
    return doc;
}

}  // namespace credigraph
