#include <gtest/gtest.h>

#include "credigraph/utf8.hpp"

using namespace credigraph;

TEST(Utf8, Length) {
    EXPECT_EQ(utf8::length("hello"), 5u);
    EXPECT_EQ(utf8::length("caf\xC3\xA9"), 4u);
    EXPECT_EQ(utf8::length("\xF0\x9F\x98\x80x"), 2u);
    EXPECT_EQ(utf8::length(""), 0u);
}

TEST(Utf8, DecodeLossyReplacesBadBytes) {
    EXPECT_EQ(utf8::decode_lossy("a\xFF" "b"), "a\xEF\xBF\xBD" "b");
    EXPECT_EQ(utf8::decode_lossy("\xC3"), "\xEF\xBF\xBD");
    // Encoded surrogates are not scalar values.
    EXPECT_NE(utf8::decode_lossy("\xED\xA0\x80").find("\xEF\xBF\xBD"), std::string::npos);
    EXPECT_EQ(utf8::decode_lossy("ok \xC3\xA9"), "ok \xC3\xA9");
}

TEST(Utf8, TruncateNeverSplits) {
    const std::string s = "\xC3\xA9\xC3\xA9\xC3\xA9";
    EXPECT_EQ(utf8::truncate(s, 2), "\xC3\xA9\xC3\xA9");
    EXPECT_EQ(utf8::truncate(s, 10), s);
    EXPECT_EQ(utf8::truncate(s, 0), "");
}
