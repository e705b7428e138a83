#include <gtest/gtest.h>

#include <fstream>

#include "credigraph/manifest.hpp"
#include "oracles.hpp"

using namespace credigraph;

TEST(Sha256, KnownVectors) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    oracle::TempDir dir;
    std::ofstream(dir / "f", std::ios::binary) << "abc";
    EXPECT_EQ(sha256_file(dir / "f"), sha256_hex("abc"));
}

TEST(RunHash, SensitiveToInputsAndConfig) {
    oracle::TempDir dir;
    std::ofstream(dir / "in") << "one";
    const auto e = describe_path(dir / "in");
    const auto h = run_hash("cmd", {e}, {{"k", 1}});
    EXPECT_EQ(h, run_hash("cmd", {e}, {{"k", 1}}));
    EXPECT_NE(h, run_hash("cmd", {e}, {{"k", 2}}));
    EXPECT_NE(h, run_hash("other", {e}, {{"k", 1}}));
    std::ofstream(dir / "in") << "two";
    EXPECT_NE(h, run_hash("cmd", {describe_path(dir / "in")}, {{"k", 1}}));
}

TEST(Manifest, UpToDateLogic) {
    oracle::TempDir dir;
    std::ofstream(dir / "out.txt") << "result";
    JobManifest m;
    m.command = "cmd";
    m.outputs = {describe_path(dir / "out.txt")};
    m.run_hash = "h1";
    m.counters["rows"] = 3;
    m.save(dir / "cmd.manifest.json");
    EXPECT_TRUE(is_up_to_date(dir / "cmd.manifest.json", "h1"));
    EXPECT_FALSE(is_up_to_date(dir / "cmd.manifest.json", "h2"));
    EXPECT_FALSE(is_up_to_date(dir / "missing.json", "h1"));
    const auto back = JobManifest::load(dir / "cmd.manifest.json");
    EXPECT_EQ(back.to_json(), m.to_json());
    std::ofstream(dir / "out.txt") << "tampered";
    EXPECT_FALSE(is_up_to_date(dir / "cmd.manifest.json", "h1"));
}

TEST(Manifest, DirectoryDescription) {
    oracle::TempDir dir;
    std::filesystem::create_directories(dir / "d/sub");
    std::ofstream(dir / "d/a") << "1";
    std::ofstream(dir / "d/sub/b") << "2";
    const auto e1 = describe_path(dir / "d");
    EXPECT_EQ(e1.bytes, 2u);
    std::ofstream(dir / "d/sub/b") << "3";
    EXPECT_NE(describe_path(dir / "d").sha256, e1.sha256);
}
