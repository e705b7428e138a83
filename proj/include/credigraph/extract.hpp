#pragma once

// Link and text extraction from WAT (metadata) and WET (conversion) records.

#include <string>
#include <vector>

#include "credigraph/archive.hpp"
#include "credigraph/errors.hpp"
#include "credigraph/timeutil.hpp"

namespace credigraph {

struct PageLink {
    std::string source_url;
    std::string target_url;

    friend bool operator==(const PageLink&, const PageLink&) = default;
};

struct WetDocument {
    std::string url;
    Timestamp fetch_time{};
    std::vector<std::string> languages;
    std::string text;
    std::size_t text_length = 0;  // unicode scalar values
};

struct LinkOptions {
    // Anchors only by default; images, scripts, stylesheets and <head> links
    // are added when set.
    bool include_all_links = false;
};

// Thrown when a WET record lacks its target URI.
class RecordRejected : public FormatError {
   public:
    using FormatError::FormatError;
};

// Links of one WAT metadata record, resolved against the page URI.
// Throws FormatError if the payload is not JSON. A missing envelope path
// yields an empty list.
std::vector<PageLink> extract_wat_links(const WarcRecord& record, const LinkOptions& options = {});

// The page URI of a WAT record (header first, then envelope).
std::optional<std::string> wat_page_uri(const WarcRecord& record);

WetDocument extract_wet_document(const WarcRecord& record);

}  // namespace credigraph
