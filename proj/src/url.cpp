#include "credigraph/url.hpp"

#include <algorithm>
#include <vector>

namespace credigraph {
namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; };
    while (!s.empty() && ws(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && ws(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::string remove_dot_segments(std::string_view input) {
    std::string in(input);
    std::string out;
    while (!in.empty()) {
        if (in.starts_with("../")) {
            in.erase(0, 3);
        } else if (in.starts_with("./")) {
            in.erase(0, 2);
        } else if (in.starts_with("/./")) {
            in.erase(0, 2);
        } else if (in == "/.") {
            in = "/";
        } else if (in.starts_with("/../") || in == "/..") {
            in = in.size() == 3 ? std::string("/") : in.substr(3);
            const auto slash = out.rfind('/');
            out.erase(slash == std::string::npos ? 0 : slash);
        } else if (in == "." || in == "..") {
            in.clear();
        } else {
            const std::size_t start = in[0] == '/' ? 1 : 0;
            const std::size_t next = in.find('/', start);
            const std::size_t len = next == std::string::npos ? in.size() : next;
            out.append(in, 0, len);
            in.erase(0, len);
        }
    }
    return out;
}

std::string merge_paths(const Uri& base, std::string_view ref_path) {
    if (base.authority && base.path.empty()) {
        return "/" + std::string(ref_path);
    }
    const auto slash = base.path.rfind('/');
    if (slash == std::string::npos) {
        return std::string(ref_path);
    }
    return base.path.substr(0, slash + 1) + std::string(ref_path);
}

std::string_view host_of_authority(std::string_view authority) {
    if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
        authority.remove_prefix(at + 1);
    }
    if (!authority.empty() && authority.front() == '[') {
        return authority;  // IPv6 literal, rejected by the caller
    }
    if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        const auto port = authority.substr(colon + 1);
        if (std::all_of(port.begin(), port.end(), is_digit)) {
            authority = authority.substr(0, colon);
        }
    }
    return authority;
}

}  // namespace

struct HostNormalizer {
    static HostResult run(std::string_view host) {
        HostResult result;
        if (!host.empty() && host.back() == '.') {
            host.remove_suffix(1);
        }
        if (host.empty()) {
            result.reason = HostReject::kNoHost;
            return result;
        }
        if (host.front() == '[') {
            result.reason = HostReject::kIpLiteral;
            return result;
        }
        std::string lower(host);
        for (char& c : lower) {
            const auto u = static_cast<unsigned char>(c);
            if (c >= 'A' && c <= 'Z') {
                c = static_cast<char>(c - 'A' + 'a');
            } else if (!(is_digit(c) || (c >= 'a' && c <= 'z') || c == '-' || c == '_' || c == '.' ||
                         u >= 0x80)) {
                result.reason = HostReject::kInvalidCharacters;
                return result;
            }
        }
        std::vector<std::string_view> labels;
        std::string_view rest = lower;
        while (true) {
            const auto dot = rest.find('.');
            labels.push_back(rest.substr(0, dot));
            if (labels.back().empty()) {
                result.reason = HostReject::kInvalidCharacters;
                return result;
            }
            if (dot == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(dot + 1);
        }
        // A host whose last label is numeric parses as an IPv4 address
        // (dotted quad, or shorthand forms such as 127.1).
        const auto& last = labels.back();
        if (std::all_of(last.begin(), last.end(), is_digit) ||
            (last.size() > 2 && last[0] == '0' && (last[1] == 'x' || last[1] == 'X'))) {
            result.reason = HostReject::kIpLiteral;
            return result;
        }
        if (labels.size() < 2) {
            result.reason = HostReject::kSingleLabel;
            return result;
        }
        std::string reversed;
        reversed.reserve(lower.size());
        for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
            if (!reversed.empty()) {
                reversed.push_back('.');
            }
            reversed.append(*it);
        }
        result.key = NodeKey(std::move(reversed));
        return result;
    }
};

std::string Uri::str() const {
    std::string out;
    if (!scheme.empty()) {
        out += scheme;
        out += ':';
    }
    if (authority) {
        out += "//";
        out += *authority;
    }
    out += path;
    if (query) {
        out += '?';
        out += *query;
    }
    if (fragment) {
        out += '#';
        out += *fragment;
    }
    return out;
}

Uri parse_uri_reference(std::string_view text) {
    text = trim(text);
    Uri uri;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
        uri.fragment = std::string(text.substr(hash + 1));
        text = text.substr(0, hash);
    }
    if (const auto q = text.find('?'); q != std::string_view::npos) {
        uri.query = std::string(text.substr(q + 1));
        text = text.substr(0, q);
    }
    if (const auto colon = text.find(':'); colon != std::string_view::npos && colon > 0 &&
                                           is_alpha(text[0])) {
        const auto candidate = text.substr(0, colon);
        const bool valid = std::all_of(candidate.begin(), candidate.end(), [](char c) {
            return is_alpha(c) || is_digit(c) || c == '+' || c == '-' || c == '.';
        });
        if (valid && candidate.find('/') == std::string_view::npos) {
            uri.scheme.assign(candidate);
            std::transform(uri.scheme.begin(), uri.scheme.end(), uri.scheme.begin(),
                           [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
            text.remove_prefix(colon + 1);
        }
    }
    if (text.starts_with("//")) {
        text.remove_prefix(2);
        const auto end = text.find('/');
        uri.authority = std::string(text.substr(0, end));
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end);
    }
    uri.path.assign(text);
    return uri;
}

std::optional<std::string> resolve_url(std::string_view base_text, std::string_view ref_text) {
    const Uri base = parse_uri_reference(base_text);
    const Uri ref = parse_uri_reference(ref_text);
    Uri target;
    if (ref.is_absolute()) {
        target = ref;
        target.path = remove_dot_segments(ref.path);
    } else {
        if (!base.is_absolute()) {
            return std::nullopt;
        }
        target.scheme = base.scheme;
        if (ref.authority) {
            target.authority = ref.authority;
            target.path = remove_dot_segments(ref.path);
            target.query = ref.query;
        } else {
            target.authority = base.authority;
            if (ref.path.empty()) {
                target.path = base.path;
                target.query = ref.query ? ref.query : base.query;
            } else {
                target.path = ref.path.front() == '/' ? remove_dot_segments(ref.path)
                                                      : remove_dot_segments(merge_paths(base, ref.path));
                target.query = ref.query;
            }
        }
        target.fragment = ref.fragment;
    }
    if (!target.authority || host_of_authority(*target.authority).empty()) {
        return std::nullopt;
    }
    return target.str();
}

std::optional<NodeKey> NodeKey::from_reversed(std::string_view reversed) {
    // Reversing twice restores the key; validation reuses the host rules.
    std::string forward;
    std::string_view rest = reversed;
    std::vector<std::string_view> labels;
    while (true) {
        const auto dot = rest.find('.');
        labels.push_back(rest.substr(0, dot));
        if (dot == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(dot + 1);
    }
    for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
        if (!forward.empty()) {
            forward.push_back('.');
        }
        forward.append(*it);
    }
    auto result = HostNormalizer::run(forward);
    if (!result.key || result.key->str() != reversed) {
        return std::nullopt;
    }
    return result.key;
}

std::string NodeKey::host() const {
    std::string forward;
    std::string_view rest = value_;
    while (!rest.empty()) {
        const auto dot = rest.rfind('.');
        if (!forward.empty()) {
            forward.push_back('.');
        }
        if (dot == std::string_view::npos) {
            forward.append(rest);
            break;
        }
        forward.append(rest.substr(dot + 1));
        rest = rest.substr(0, dot);
    }
    return forward;
}

HostResult normalize_host(std::string_view url) {
    const Uri uri = parse_uri_reference(url);
    if (!uri.is_absolute() || !uri.authority) {
        return HostResult{std::nullopt, HostReject::kNoHost};
    }
    return HostNormalizer::run(host_of_authority(*uri.authority));
}

HostResult normalize_bare_host(std::string_view host) { return HostNormalizer::run(trim(host)); }

std::string_view to_string(HostReject reason) noexcept {
    switch (reason) {
        case HostReject::kNone:
            return "none";
        case HostReject::kNoHost:
            return "no-host";
        case HostReject::kIpLiteral:
            return "ip-literal";
        case HostReject::kSingleLabel:
            return "single-label";
        case HostReject::kInvalidCharacters:
            return "invalid-characters";
    }
    return "unknown";
}

}  // namespace credigraph
