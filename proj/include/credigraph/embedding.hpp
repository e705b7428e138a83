#pragma once

// Per-domain embedding vectors: provider ingestion, prefix (matryoshka)
// truncation, deterministic pseudo-embeddings, and the CGEMB1 file format.
//
// Embedding file: `CGEMB1\0\0`, u32 dim, u64 row count, then per row a u16
// key length, the key bytes and dim little-endian float32 values.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "credigraph/binary_io.hpp"
#include "credigraph/text.hpp"

namespace credigraph {

inline constexpr std::size_t kDefaultEmbeddingDim = 1024;
inline constexpr std::size_t kDefaultMrlDim = 128;
inline constexpr io::Magic kEmbeddingMagic = io::make_magic("CGEMB1");

class EmbeddingMatrix {
   public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t dim, std::string provider_tag);

    // Throws DataError on a wrong-length or non-finite row, or a repeated key.
    void add_row(std::string key, std::span<const float> values);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t rows() const noexcept { return keys_.size(); }
    [[nodiscard]] const std::vector<std::string>& keys() const noexcept { return keys_; }
    [[nodiscard]] std::span<const float> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }
    [[nodiscard]] std::optional<std::size_t> find(std::string_view key) const;
    [[nodiscard]] const std::string& provider_tag() const noexcept { return provider_tag_; }
    void set_provider_tag(std::string tag) { provider_tag_ = std::move(tag); }

    void save(const std::filesystem::path& path) const;
    static EmbeddingMatrix load(const std::filesystem::path& path);

    friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
        return a.dim_ == b.dim_ && a.keys_ == b.keys_ && a.data_ == b.data_;
    }

   private:
    std::size_t dim_ = 0;
    std::vector<std::string> keys_;
    std::vector<float> data_;
    std::string provider_tag_;
    mutable std::vector<std::size_t> sorted_index_;
};

// Appends rows to a CGEMB1 file as they arrive; the row count is patched in
// on close().
class EmbeddingWriter {
   public:
    EmbeddingWriter(const std::filesystem::path& path, std::size_t dim);
    ~EmbeddingWriter();
    void write(std::string_view key, std::span<const float> values);
    void close();
    [[nodiscard]] std::uint64_t count() const noexcept { return count_; }

   private:
    std::ofstream out_;
    std::size_t dim_;
    std::uint64_t count_ = 0;
};

// Provider contract: one vector (or one error) per input text, in order.
struct EmbedBatch {
    std::vector<std::vector<float>> vectors;
    std::vector<std::optional<std::string>> errors;
};

class EmbeddingProvider {
   public:
    virtual ~EmbeddingProvider() = default;
    [[nodiscard]] virtual std::size_t dim() const = 0;
    [[nodiscard]] virtual std::string tag() const = 0;
    virtual EmbedBatch embed(std::span<const std::string> texts) = 0;
};

// Unit-norm Gaussian direction seeded by FNV-1a(text) mixed with `seed`.
std::vector<float> pseudo_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

class PseudoEmbeddingProvider final : public EmbeddingProvider {
   public:
    PseudoEmbeddingProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}
    [[nodiscard]] std::size_t dim() const override { return dim_; }
    [[nodiscard]] std::string tag() const override;
    EmbedBatch embed(std::span<const std::string> texts) override;

   private:
    std::size_t dim_;
    std::uint64_t seed_;
};

class ConstantProvider final : public EmbeddingProvider {
   public:
    ConstantProvider(std::size_t dim, float value) : dim_(dim), value_(value) {}
    [[nodiscard]] std::size_t dim() const override { return dim_; }
    [[nodiscard]] std::string tag() const override { return "constant"; }
    EmbedBatch embed(std::span<const std::string> texts) override;

   private:
    std::size_t dim_;
    float value_;
};

struct IngestOptions {
    std::size_t batch_size = 32;
    std::size_t max_retries = 2;
};

struct IngestResult {
    EmbeddingMatrix matrix;
    std::vector<std::string> missing;  // keys whose retries were exhausted
};

// Throws ProviderError if the provider returns vectors of the wrong width.
// When `persist_to` is set, rows are appended to that file batch by batch.
IngestResult ingest_embeddings(RecordSource<DomainTextBundle>& bundles, EmbeddingProvider& provider,
                               const IngestOptions& options = {},
                               const std::optional<std::filesystem::path>& persist_to = std::nullopt);

// First k coordinates of every row, rescaled to unit L2 norm (all-zero
// prefixes stay zero). Throws ParameterError unless 0 < k <= dim.
EmbeddingMatrix mrl_truncate(const EmbeddingMatrix& matrix, std::size_t k);

}  // namespace credigraph
