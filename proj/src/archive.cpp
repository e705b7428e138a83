#include "credigraph/archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <deque>
#include <strings.h>

#include "credigraph/errors.hpp"

namespace credigraph {
namespace {

constexpr std::size_t kChunk = 1 << 16;

bool iequals(std::string_view a, std::string_view b) noexcept {
    return a.size() == b.size() && strncasecmp(a.data(), b.data(), a.size()) == 0;
}

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// Fills the record header fields from the parsed header block.
void finish_headers(WarcRecord& record) {
    const std::string* type = record.header("WARC-Type");
    record.record_type = type ? parse_record_type(*type) : RecordType::kOther;
    if (const std::string* uri = record.header("WARC-Target-URI")) {
        std::string_view u = *uri;
        // Some writers wrap the URI in angle brackets (WARC/1.0 grammar).
        if (u.size() >= 2 && u.front() == '<' && u.back() == '>') {
            u = u.substr(1, u.size() - 2);
        }
        record.target_uri = std::string(u);
    }
    const std::string* date = record.header("WARC-Date");
    if (!date) {
        throw FormatError("record without WARC-Date");
    }
    record.date = parse_timestamp(*date);
}

std::uint64_t parse_length(std::string_view value) {
    std::uint64_t n = 0;
    value = strip(value);
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw FormatError("bad Content-Length `" + std::string(value) + "`");
    }
    return n;
}

void parse_header_line(WarcRecord& record, std::string_view line) {
    if (!line.empty() && (line.front() == ' ' || line.front() == '\t') && !record.headers.empty()) {
        auto& value = record.headers.back().second;
        value.push_back(' ');
        value.append(strip(line));
        return;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0) {
        throw FormatError("malformed header line `" + std::string(line) + "`");
    }
    record.headers.emplace_back(std::string(strip(line.substr(0, colon))),
                                std::string(strip(line.substr(colon + 1))));
}

bool is_version_line(std::string_view line) { return line.starts_with("WARC/"); }

}  // namespace

RecordType parse_record_type(std::string_view name) noexcept {
    if (iequals(name, "warcinfo")) return RecordType::kWarcinfo;
    if (iequals(name, "response")) return RecordType::kResponse;
    if (iequals(name, "request")) return RecordType::kRequest;
    if (iequals(name, "metadata")) return RecordType::kMetadata;
    if (iequals(name, "conversion")) return RecordType::kConversion;
    return RecordType::kOther;
}

std::string_view to_string(RecordType type) noexcept {
    switch (type) {
        case RecordType::kWarcinfo: return "warcinfo";
        case RecordType::kResponse: return "response";
        case RecordType::kRequest: return "request";
        case RecordType::kMetadata: return "metadata";
        case RecordType::kConversion: return "conversion";
        case RecordType::kOther: return "other";
    }
    return "other";
}

const std::string* WarcRecord::header(std::string_view name) const noexcept {
    for (const auto& [k, v] : headers) {
        if (iequals(k, name)) {
            return &v;
        }
    }
    return nullptr;
}

std::vector<WarcRecord> parse_warc_records(std::string_view buffer) {
    std::vector<WarcRecord> records;
    std::size_t pos = 0;
    const auto next_line = [&]() -> std::string_view {
        const auto nl = buffer.find('\n', pos);
        if (nl == std::string_view::npos) {
            throw FormatError("record header not terminated");
        }
        std::string_view line = buffer.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        pos = nl + 1;
        return line;
    };
    while (true) {
        while (pos < buffer.size() && (buffer[pos] == '\r' || buffer[pos] == '\n')) {
            ++pos;
        }
        if (pos >= buffer.size()) {
            break;
        }
        const std::string_view version = next_line();
        if (!is_version_line(version)) {
            throw FormatError("expected WARC version line, got `" + std::string(version.substr(0, 40)) + "`");
        }
        WarcRecord record;
        for (std::string_view line = next_line(); !line.empty(); line = next_line()) {
            parse_header_line(record, line);
        }
        const std::string* length = record.header("Content-Length");
        if (!length) {
            throw FormatError("record without Content-Length");
        }
        record.content_length = parse_length(*length);
        if (record.content_length > buffer.size() - pos) {
            throw FormatError("payload shorter than Content-Length");
        }
        record.payload.assign(buffer.substr(pos, record.content_length));
        pos += record.content_length;
        finish_headers(record);
        records.push_back(std::move(record));
    }
    return records;
}

std::string serialize_warc_record(const WarcRecord& record) {
    std::string out = "WARC/1.1\r\n";
    bool wrote_length = false;
    for (const auto& [k, v] : record.headers) {
        if (iequals(k, "Content-Length")) {
            out += "Content-Length: " + std::to_string(record.payload.size()) + "\r\n";
            wrote_length = true;
            continue;
        }
        out += k;
        out += ": ";
        out += v;
        out += "\r\n";
    }
    if (!wrote_length) {
        out += "Content-Length: " + std::to_string(record.payload.size()) + "\r\n";
    }
    out += "\r\n";
    out += record.payload;
    out += "\r\n\r\n";
    return out;
}

std::string gzip_compress(std::string_view data) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw IoError("deflateInit2 failed");
    }
    std::string out;
    out.resize(deflateBound(&zs, static_cast<uLong>(data.size())) + 32);
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) {
        throw IoError("deflate failed");
    }
    out.resize(zs.total_out);
    return out;
}

// ---------------------------------------------------------------------------

class ArchiveReader::Impl {
   public:
    explicit Impl(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) {
            throw IoError("cannot open archive `" + path.string() + "`");
        }
        std::error_code ec;
        size_ = std::filesystem::file_size(path, ec);
        if (ec) {
            throw IoError("cannot stat archive `" + path.string() + "`: " + ec.message());
        }
        std::array<unsigned char, 2> magic{};
        in_.read(reinterpret_cast<char*>(magic.data()), 2);
        gzip_ = in_.gcount() == 2 && magic[0] == 0x1F && magic[1] == 0x8B;
        in_.clear();
        in_.seekg(0);
    }

    std::optional<WarcRecord> next() {
        while (pending_.empty()) {
            if (pos_ >= size_) {
                return std::nullopt;
            }
            if (gzip_) {
                read_member();
            } else {
                read_plain();
            }
        }
        WarcRecord r = std::move(pending_.front());
        pending_.pop_front();
        return r;
    }

    std::vector<RecordError> errors;
    std::function<void(const RecordError&)> callback;
    bool gzip_ = false;

   private:
    void report(std::uint64_t offset, std::string message) {
        // A run of unreadable bytes with no good member in between is one error.
        if (in_damaged_region_) {
            return;
        }
        in_damaged_region_ = true;
        errors.push_back(RecordError{offset, std::move(message)});
        if (callback) {
            callback(errors.back());
        }
    }

    // Decodes one gzip member starting at pos_. On success pos_ advances past
    // it; otherwise pos_ moves to the next plausible member header.
    void read_member() {
        const std::uint64_t start = pos_;
        std::string decoded;
        std::string error;
        std::uint64_t consumed = 0;
        if (inflate_member(start, decoded, consumed, error)) {
            try {
                auto records = parse_warc_records(decoded);
                pos_ = start + consumed;
                in_damaged_region_ = false;
                for (auto& r : records) {
                    pending_.push_back(std::move(r));
                }
                return;
            } catch (const FormatError& e) {
                report(start, std::string("malformed record in gzip member: ") + e.what());
                pos_ = start + consumed;
                return;
            }
        }
        report(start, "corrupt gzip member: " + error);
        pos_ = find_next_member(start + 1);
    }

    bool inflate_member(std::uint64_t start, std::string& decoded, std::uint64_t& consumed,
                        std::string& error) {
        z_stream zs{};
        if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
            throw IoError("inflateInit2 failed");
        }
        in_.clear();
        in_.seekg(static_cast<std::streamoff>(start));
        std::array<char, kChunk> out_buf{};
        int rc = Z_OK;
        while (rc != Z_STREAM_END) {
            if (zs.avail_in == 0) {
                in_.read(in_buf_.data(), static_cast<std::streamsize>(in_buf_.size()));
                const auto got = in_.gcount();
                if (got <= 0) {
                    error = "unexpected end of file";
                    inflateEnd(&zs);
                    return false;
                }
                zs.next_in = reinterpret_cast<Bytef*>(in_buf_.data());
                zs.avail_in = static_cast<uInt>(got);
            }
            zs.next_out = reinterpret_cast<Bytef*>(out_buf.data());
            zs.avail_out = static_cast<uInt>(out_buf.size());
            rc = inflate(&zs, Z_NO_FLUSH);
            if (rc != Z_OK && rc != Z_STREAM_END) {
                error = zs.msg ? zs.msg : "inflate error " + std::to_string(rc);
                inflateEnd(&zs);
                return false;
            }
            decoded.append(out_buf.data(), out_buf.size() - zs.avail_out);
        }
        consumed = zs.total_in;
        inflateEnd(&zs);
        return true;
    }

    std::uint64_t find_next_member(std::uint64_t from) {
        in_.clear();
        in_.seekg(static_cast<std::streamoff>(from));
        std::uint64_t base = from;
        std::string carry;
        while (true) {
            in_.read(in_buf_.data(), static_cast<std::streamsize>(in_buf_.size()));
            const auto got = in_.gcount();
            if (got <= 0) {
                return size_;
            }
            std::string_view window(in_buf_.data(), static_cast<std::size_t>(got));
            std::string joined = carry + std::string(window);
            const auto hit = joined.find("\x1F\x8B\x08");
            if (hit != std::string::npos) {
                return base - carry.size() + hit;
            }
            carry = joined.substr(joined.size() >= 2 ? joined.size() - 2 : 0);
            base += static_cast<std::uint64_t>(got);
        }
    }

    // Plain WARC: stream one record at a time from pos_.
    void read_plain() {
        in_.clear();
        in_.seekg(static_cast<std::streamoff>(pos_));
        const std::uint64_t start = pos_;
        std::string line;
        // Skip blank separator lines.
        while (true) {
            if (!std::getline(in_, line)) {
                pos_ = size_;
                return;
            }
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (!line.empty()) {
                break;
            }
        }
        try {
            if (!is_version_line(line)) {
                throw FormatError("expected WARC version line");
            }
            WarcRecord record;
            while (true) {
                if (!std::getline(in_, line)) {
                    throw FormatError("record header not terminated");
                }
                if (!line.empty() && line.back() == '\r') {
                    line.pop_back();
                }
                if (line.empty()) {
                    break;
                }
                parse_header_line(record, line);
            }
            const std::string* length = record.header("Content-Length");
            if (!length) {
                throw FormatError("record without Content-Length");
            }
            record.content_length = parse_length(*length);
            record.payload.resize(record.content_length);
            in_.read(record.payload.data(), static_cast<std::streamsize>(record.content_length));
            if (static_cast<std::uint64_t>(in_.gcount()) != record.content_length) {
                throw FormatError("payload shorter than Content-Length");
            }
            finish_headers(record);
            pos_ = static_cast<std::uint64_t>(in_.tellg());
            in_damaged_region_ = false;
            pending_.push_back(std::move(record));
        } catch (const FormatError& e) {
            report(start, e.what());
            pos_ = find_next_version_line(start + 1);
        }
    }

    std::uint64_t find_next_version_line(std::uint64_t from) {
        in_.clear();
        in_.seekg(static_cast<std::streamoff>(from));
        std::string line;
        std::uint64_t offset = from;
        while (std::getline(in_, line)) {
            if (line.starts_with("WARC/") && offset != from) {
                return offset;
            }
            offset += line.size() + 1;
        }
        return size_;
    }

    std::filesystem::path path_;
    std::ifstream in_;
    std::uint64_t size_ = 0;
    std::uint64_t pos_ = 0;
    bool in_damaged_region_ = false;
    std::deque<WarcRecord> pending_;
    std::array<char, kChunk> in_buf_{};
};

ArchiveReader::ArchiveReader(const std::filesystem::path& path) : impl_(std::make_unique<Impl>(path)) {}
ArchiveReader::~ArchiveReader() = default;
ArchiveReader::ArchiveReader(ArchiveReader&&) noexcept = default;
ArchiveReader& ArchiveReader::operator=(ArchiveReader&&) noexcept = default;

std::optional<WarcRecord> ArchiveReader::next() { return impl_->next(); }
const std::vector<RecordError>& ArchiveReader::errors() const noexcept { return impl_->errors; }
bool ArchiveReader::compressed() const noexcept { return impl_->gzip_; }
void ArchiveReader::on_error(std::function<void(const RecordError&)> callback) {
    impl_->callback = std::move(callback);
}

// ---------------------------------------------------------------------------

ArchiveWriter::ArchiveWriter(const std::filesystem::path& path, bool gzip)
    : out_(path, std::ios::binary | std::ios::trunc), gzip_(gzip) {
    if (!out_) {
        throw IoError("cannot create archive `" + path.string() + "`");
    }
}

void ArchiveWriter::write(const WarcRecord& record) {
    offsets_.push_back(static_cast<std::uint64_t>(out_.tellp()));
    const std::string bytes = serialize_warc_record(record);
    if (gzip_) {
        const std::string member = gzip_compress(bytes);
        out_.write(member.data(), static_cast<std::streamsize>(member.size()));
    } else {
        out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    if (!out_) {
        throw IoError("write failed");
    }
}

void ArchiveWriter::close() {
    if (out_.is_open()) {
        out_.close();
    }
}

ArchiveWriter::~ArchiveWriter() { close(); }

}  // namespace credigraph
