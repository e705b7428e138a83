#include <gtest/gtest.h>

#include <fstream>

#include "credigraph/archive.hpp"
#include "credigraph/errors.hpp"
#include "oracles.hpp"

using namespace credigraph;

namespace {

WarcRecord record(const std::string& type, const std::string& uri, const std::string& payload) {
    WarcRecord r;
    r.headers = {{"WARC-Type", type},
                 {"WARC-Target-URI", uri},
                 {"WARC-Date", "2024-12-03T04:05:06Z"},
                 {"Content-Type", "application/json"}};
    r.payload = payload;
    return r;
}

std::vector<WarcRecord> read_all(const std::filesystem::path& p, std::size_t* errors = nullptr) {
    ArchiveReader reader(p);
    std::vector<WarcRecord> out;
    while (auto r = reader.next()) {
        out.push_back(std::move(*r));
    }
    if (errors) *errors = reader.errors().size();
    return out;
}

}  // namespace

TEST(Archive, EmptyFileYieldsNothing) {
    oracle::TempDir dir;
    std::ofstream(dir / "empty.warc.gz").close();
    std::size_t errors = 99;
    EXPECT_TRUE(read_all(dir / "empty.warc.gz", &errors).empty());
    EXPECT_EQ(errors, 0u);
}

TEST(Archive, MissingFileThrows) {
    EXPECT_THROW(ArchiveReader("/nonexistent/x.warc.gz"), IoError);
}

TEST(Archive, ThreeMetadataRecords) {
    oracle::TempDir dir;
    {
        ArchiveWriter w(dir / "a.wat.gz", true);
        for (int i = 0; i < 3; ++i) {
            w.write(record("metadata", "https://e.com/" + std::to_string(i), "{}"));
        }
    }
    const auto recs = read_all(dir / "a.wat.gz");
    ASSERT_EQ(recs.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(recs[i].record_type, RecordType::kMetadata);
        EXPECT_EQ(*recs[i].target_uri, "https://e.com/" + std::to_string(i));
        EXPECT_EQ(recs[i].payload, "{}");
        EXPECT_EQ(recs[i].content_length, 2u);
        EXPECT_EQ(format_timestamp(recs[i].date), "2024-12-03T04:05:06Z");
    }
}

TEST(Archive, CorruptMiddleMemberIsSkipped) {
    oracle::TempDir dir;
    std::vector<std::uint64_t> offsets;
    {
        ArchiveWriter w(dir / "c.wat.gz", true);
        for (int i = 0; i < 3; ++i) {
            w.write(record("metadata", "https://e.com/" + std::to_string(i), std::string(200, 'a' + i)));
        }
        w.close();
        offsets = w.record_offsets();
    }
    // Flip bytes in the middle of member 2's deflate stream.
    std::fstream f(dir / "c.wat.gz", std::ios::in | std::ios::out | std::ios::binary);
    const auto mid = (offsets[1] + offsets[2]) / 2;
    for (std::uint64_t p = mid; p < mid + 4; ++p) {
        f.seekg(static_cast<std::streamoff>(p));
        char c;
        f.get(c);
        f.seekp(static_cast<std::streamoff>(p));
        f.put(static_cast<char>(c ^ 0x5A));
    }
    f.close();

    ArchiveReader reader(dir / "c.wat.gz");
    std::vector<std::string> uris;
    while (auto r = reader.next()) {
        uris.push_back(*r->target_uri);
    }
    EXPECT_EQ(uris, (std::vector<std::string>{"https://e.com/0", "https://e.com/2"}));
    ASSERT_EQ(reader.errors().size(), 1u);
    EXPECT_GE(reader.errors()[0].offset, offsets[1]);
    EXPECT_LT(reader.errors()[0].offset, offsets[2]);
}

TEST(Archive, TruncatedTailReportsError) {
    oracle::TempDir dir;
    {
        ArchiveWriter w(dir / "t.gz", true);
        w.write(record("metadata", "https://e.com/", "x"));
        w.write(record("metadata", "https://f.com/", std::string(100, 'y')));
    }
    const auto size = std::filesystem::file_size(dir / "t.gz");
    std::filesystem::resize_file(dir / "t.gz", size - 10);
    std::size_t errors = 0;
    EXPECT_EQ(read_all(dir / "t.gz", &errors).size(), 1u);
    EXPECT_EQ(errors, 1u);
}

TEST(Archive, PlainStreamRoundTrip) {
    oracle::TempDir dir;
    std::vector<WarcRecord> written;
    {
        ArchiveWriter w(dir / "p.warc", false);
        for (int i = 0; i < 20; ++i) {
            auto r = record(i % 2 ? "conversion" : "response", "http://x.org/" + std::to_string(i),
                            "body\r\n\r\nwith blank lines " + std::to_string(i));
            w.write(r);
            written.push_back(r);
        }
    }
    ArchiveReader reader(dir / "p.warc");
    EXPECT_FALSE(reader.compressed());
    for (const auto& w : written) {
        auto r = reader.next();
        ASSERT_TRUE(r);
        EXPECT_EQ(r->payload, w.payload);
        EXPECT_EQ(*r->target_uri, w.headers[1].second);
        EXPECT_EQ(*r->header("warc-type"), w.headers[0].second);
    }
    EXPECT_FALSE(reader.next());
    EXPECT_TRUE(reader.errors().empty());
}

TEST(Archive, BinaryPayloadAndTypes) {
    std::string payload;
    for (int i = 0; i < 256; ++i) payload += static_cast<char>(i);
    auto r = record("warcinfo", "", payload);
    const auto parsed = parse_warc_records(serialize_warc_record(r));
    ASSERT_EQ(parsed.size(), 1u);
    EXPECT_EQ(parsed[0].payload, payload);
    EXPECT_EQ(parsed[0].record_type, RecordType::kWarcinfo);
    EXPECT_EQ(parse_record_type("conversion"), RecordType::kConversion);
    EXPECT_EQ(parse_record_type("revisit"), RecordType::kOther);
    EXPECT_THROW(parse_warc_records("NOT A WARC\r\n\r\n"), FormatError);
}
