#pragma once

// Streaming reader for WARC-family archives (WARC, WAT, WET).
//
// Files are either plain WARC streams or a concatenation of gzip members.
// A gzip member is decoded in full and its CRC checked before any record
// inside it is handed out, so a damaged member yields no records at all.
// Resident memory is one decompressed member plus a fixed read buffer; by
// archive convention a member holds exactly one record.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "credigraph/timeutil.hpp"

namespace credigraph {

enum class RecordType { kWarcinfo, kResponse, kRequest, kMetadata, kConversion, kOther };

RecordType parse_record_type(std::string_view name) noexcept;
std::string_view to_string(RecordType type) noexcept;

struct WarcRecord {
    RecordType record_type = RecordType::kOther;
    std::optional<std::string> target_uri;
    Timestamp date{};
    std::uint64_t content_length = 0;
    // Header order is preserved; lookups are case-insensitive.
    std::vector<std::pair<std::string, std::string>> headers;
    std::string payload;

    [[nodiscard]] const std::string* header(std::string_view name) const noexcept;
};

struct RecordError {
    std::uint64_t offset = 0;  // byte offset in the (compressed) file
    std::string message;
};

class ArchiveReader {
   public:
    // Throws IoError if the file cannot be opened.
    explicit ArchiveReader(const std::filesystem::path& path);
    ~ArchiveReader();
    ArchiveReader(ArchiveReader&&) noexcept;
    ArchiveReader& operator=(ArchiveReader&&) noexcept;
    ArchiveReader(const ArchiveReader&) = delete;
    ArchiveReader& operator=(const ArchiveReader&) = delete;

    // Next well-formed record in file order, or nullopt at end of file.
    // Damaged regions are skipped and reported through errors().
    std::optional<WarcRecord> next();

    [[nodiscard]] const std::vector<RecordError>& errors() const noexcept;
    [[nodiscard]] bool compressed() const noexcept;

    // Invoked as soon as an error is recorded, in addition to errors().
    void on_error(std::function<void(const RecordError&)> callback);

   private:
    class Impl;
    std::unique_ptr<Impl> impl_;
};

// Parses every record of `buffer` (uncompressed WARC bytes). Throws FormatError.
std::vector<WarcRecord> parse_warc_records(std::string_view buffer);

// Serialises one record (version line, headers, payload, CRLF CRLF). The
// Content-Length header is always derived from the payload.
std::string serialize_warc_record(const WarcRecord& record);

// Writes records as one gzip member each, or as a plain stream.
class ArchiveWriter {
   public:
    ArchiveWriter(const std::filesystem::path& path, bool gzip);
    void write(const WarcRecord& record);
    void close();
    ~ArchiveWriter();

    // Byte offsets at which each member/record started.
    [[nodiscard]] const std::vector<std::uint64_t>& record_offsets() const noexcept { return offsets_; }

   private:
    std::ofstream out_;
    bool gzip_;
    std::vector<std::uint64_t> offsets_;
};

std::string gzip_compress(std::string_view data);

}  // namespace credigraph
