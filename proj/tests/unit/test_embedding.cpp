#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "credigraph/embedding.hpp"
#include "credigraph/errors.hpp"
#include "oracles.hpp"

using namespace credigraph;

namespace {

std::vector<DomainTextBundle> bundles(std::size_t n) {
    std::vector<DomainTextBundle> out;
    for (std::size_t i = 0; i < n; ++i) {
        DomainTextBundle b;
        b.node = *NodeKey::from_reversed("com.b" + std::to_string(1000 + i));
        b.merged_text = "text of domain " + std::to_string(i);
        out.push_back(b);
    }
    return out;
}

double norm(std::span<const float> v) {
    double s = 0;
    for (float x : v) s += static_cast<double>(x) * x;
    return std::sqrt(s);
}

// Fails every call that contains `bad`, counting the calls.
class FlakyProvider final : public EmbeddingProvider {
   public:
    explicit FlakyProvider(std::string bad) : bad_(std::move(bad)) {}
    std::size_t dim() const override { return 4; }
    std::string tag() const override { return "flaky"; }
    EmbedBatch embed(std::span<const std::string> texts) override {
        ++calls;
        EmbedBatch b;
        for (const auto& t : texts) {
            if (t == bad_) {
                b.vectors.emplace_back();
                b.errors.emplace_back("rate limited");
            } else {
                b.vectors.push_back({1, 0, 0, 0});
                b.errors.emplace_back();
            }
        }
        return b;
    }
    int calls = 0;

   private:
    std::string bad_;
};

class WrongWidth final : public EmbeddingProvider {
   public:
    std::size_t dim() const override { return 8; }
    std::string tag() const override { return "wrong"; }
    EmbedBatch embed(std::span<const std::string> texts) override {
        return {std::vector<std::vector<float>>(texts.size(), std::vector<float>(4, 1.0F)),
                std::vector<std::optional<std::string>>(texts.size())};
    }
};

}  // namespace

TEST(Ingest, ConstantProviderRows) {
    VectorSource<DomainTextBundle> src(bundles(3));
    ConstantProvider p(16, 1.0F);
    const auto r = ingest_embeddings(src, p);
    ASSERT_EQ(r.matrix.rows(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        for (float x : r.matrix.row(i)) EXPECT_EQ(x, 1.0F);
    }
    EXPECT_TRUE(r.missing.empty());
}

TEST(Ingest, FailureAfterRetries) {
    auto b = bundles(3);
    VectorSource<DomainTextBundle> src(b);
    FlakyProvider p(b[1].merged_text);
    const auto r = ingest_embeddings(src, p, {.batch_size = 8, .max_retries = 2});
    EXPECT_EQ(r.matrix.rows(), 2u);
    EXPECT_EQ(r.missing, std::vector<std::string>{b[1].node.str()});
    EXPECT_EQ(p.calls, 3);  // one batch call, two single retries
}

TEST(Ingest, PseudoProviderDeterministicBytes) {
    oracle::TempDir dir;
    for (const char* name : {"a.cgemb", "b.cgemb"}) {
        VectorSource<DomainTextBundle> src(bundles(100));
        PseudoEmbeddingProvider p(64, 3);
        ingest_embeddings(src, p, {.batch_size = 7}, dir / name);
    }
    std::ifstream a(dir / "a.cgemb", std::ios::binary), b(dir / "b.cgemb", std::ios::binary);
    const std::string sa{std::istreambuf_iterator<char>(a), {}}, sb{std::istreambuf_iterator<char>(b), {}};
    EXPECT_EQ(sa, sb);
    const auto m = EmbeddingMatrix::load(dir / "a.cgemb");
    EXPECT_EQ(m.rows(), 100u);
    EXPECT_EQ(m.dim(), 64u);
}

TEST(Ingest, DimensionMismatch) {
    VectorSource<DomainTextBundle> src(bundles(2));
    WrongWidth p;
    EXPECT_THROW(ingest_embeddings(src, p), ProviderError);
}

TEST(Mrl, PrefixRenormalized) {
    EmbeddingMatrix m(4, "t");
    const float row[] = {3, 4, 0, 0};
    m.add_row("com.a", row);
    const float zero[] = {0, 0, 1, 0};
    m.add_row("com.b", zero);
    const auto t = mrl_truncate(m, 2);
    EXPECT_FLOAT_EQ(t.row(0)[0], 0.6F);
    EXPECT_FLOAT_EQ(t.row(0)[1], 0.8F);
    EXPECT_EQ(t.row(1)[0], 0.0F);
    EXPECT_EQ(t.row(1)[1], 0.0F);
    EXPECT_EQ(t.provider_tag(), "t/mrl2");
}

TEST(Mrl, IdentityAndNorms) {
    EmbeddingMatrix m(1024, "pseudo");
    for (int i = 0; i < 50; ++i) m.add_row("k" + std::to_string(i), pseudo_embed("t" + std::to_string(i), 1024, 1));
    const auto same = mrl_truncate(m, 1024);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < 1024; ++j) EXPECT_NEAR(same.row(i)[j], m.row(i)[j], 1e-6);
    }
    const auto t = mrl_truncate(m, 128);
    for (std::size_t i = 0; i < t.rows(); ++i) EXPECT_NEAR(norm(t.row(i)), 1.0, 1e-6);
    // Prefix consistency: truncating twice equals truncating once.
    const auto tt = mrl_truncate(mrl_truncate(m, 256), 128);
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < 128; ++j) EXPECT_NEAR(tt.row(i)[j], t.row(i)[j], 1e-6);
    }
    EXPECT_THROW(mrl_truncate(m, 0), ParameterError);
    EXPECT_THROW(mrl_truncate(m, 1025), ParameterError);
}

TEST(PseudoEmbed, DeterministicAndDistinct) {
    EXPECT_EQ(pseudo_embed("abc", 32, 1), pseudo_embed("abc", 32, 1));
    EXPECT_NE(pseudo_embed("abc", 32, 1), pseudo_embed("abd", 32, 1));
    EXPECT_NE(pseudo_embed("abc", 32, 1), pseudo_embed("abc", 32, 2));
    EXPECT_NEAR(norm(pseudo_embed("abc", 32, 1)), 1.0, 1e-6);
}

TEST(PseudoEmbed, NearOrthogonal) {
    const std::size_t n = 10000, dim = 64;
    std::vector<std::vector<float>> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(pseudo_embed("doc " + std::to_string(i), dim, 0));
    // Mean |cos| over consecutive pairs plus a strided sample.
    double sum = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j : {i + 1, (i * 7919 + 13) % n}) {
            if (j == i) continue;
            double dot = 0;
            for (std::size_t k = 0; k < dim; ++k) dot += static_cast<double>(v[i][k]) * v[j][k];
            sum += std::abs(dot);
            ++pairs;
        }
    }
    EXPECT_LT(sum / static_cast<double>(pairs), 0.2);
}

TEST(Matrix, FileRoundTripAndValidation) {
    oracle::TempDir dir;
    EmbeddingMatrix m(3, "x");
    const float a[] = {1.5F, -2.0F, 0.25F};
    const float b[] = {0.0F, 1e-30F, 3.0F};
    m.add_row("com.b", a);
    m.add_row("com.a", b);
    m.save(dir / "m.cgemb");
    const auto back = EmbeddingMatrix::load(dir / "m.cgemb");
    EXPECT_EQ(back, m);
    EXPECT_EQ(*back.find("com.a"), 1u);
    EXPECT_FALSE(back.find("com.c"));

    EXPECT_THROW(m.add_row("com.b", a), DataError);
    const float bad[] = {NAN, 0, 0};
    EXPECT_THROW(m.add_row("com.c", bad), DataError);
    const float shortrow[] = {1, 2};
    EXPECT_THROW(m.add_row("com.d", shortrow), DataError);

    std::filesystem::resize_file(dir / "m.cgemb", std::filesystem::file_size(dir / "m.cgemb") - 3);
    EXPECT_THROW(EmbeddingMatrix::load(dir / "m.cgemb"), FormatError);
}
