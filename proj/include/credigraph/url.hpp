#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace credigraph {

// RFC 3986 generic-syntax components. `authority` is absent (not empty) when
// the reference has no `//` part.
struct Uri {
    std::string scheme;
    std::optional<std::string> authority;
    std::string path;
    std::optional<std::string> query;
    std::optional<std::string> fragment;

    [[nodiscard]] std::string str() const;
    [[nodiscard]] bool is_absolute() const noexcept { return !scheme.empty(); }
};

// Splits a URI reference into components. Never fails; a reference with an
// invalid scheme is treated as a relative path.
Uri parse_uri_reference(std::string_view text);

// Resolves `ref` against `base`. Returns nullopt unless the result has a
// scheme and a non-empty authority (mailto:, javascript:, bare paths are dropped).
std::optional<std::string> resolve_url(std::string_view base, std::string_view ref);

// Canonical reversed-host vertex key, e.g. `com.example.news`.
class NodeKey {
   public:
    NodeKey() = default;

    // Accepts an already-reversed key read back from an artifact. Validates
    // the same character and label rules as normalize_host.
    static std::optional<NodeKey> from_reversed(std::string_view reversed);

    [[nodiscard]] const std::string& str() const noexcept { return value_; }

    // Forward host form, `news.example.com`.
    [[nodiscard]] std::string host() const;

    friend auto operator<=>(const NodeKey&, const NodeKey&) = default;
    friend bool operator==(const NodeKey&, const NodeKey&) = default;

   private:
    explicit NodeKey(std::string v) : value_(std::move(v)) {}
    friend struct HostNormalizer;
    std::string value_;
};

enum class HostReject {
    kNone,
    kNoHost,
    kIpLiteral,
    kSingleLabel,
    kInvalidCharacters,
};

struct HostResult {
    std::optional<NodeKey> key;
    HostReject reason = HostReject::kNone;

    explicit operator bool() const noexcept { return key.has_value(); }
};

// Host of an absolute URL -> lowercase reversed labels. Ports, userinfo and a
// trailing dot are stripped; `www` is kept and subdomains stay distinct.
HostResult normalize_host(std::string_view url);

// Same rules applied to a bare host name.
HostResult normalize_bare_host(std::string_view host);

std::string_view to_string(HostReject reason) noexcept;

}  // namespace credigraph
