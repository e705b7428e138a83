#include "credigraph/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "credigraph/errors.hpp"
#include "credigraph/rng.hpp"

namespace credigraph {

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::string provider_tag)
    : dim_(dim), provider_tag_(std::move(provider_tag)) {
    if (dim == 0) {
        throw ParameterError("embedding dimension must be positive");
    }
}

void EmbeddingMatrix::add_row(std::string key, std::span<const float> values) {
    if (values.size() != dim_) {
        throw DataError("row for `" + key + "` has " + std::to_string(values.size()) + " values, expected " +
                        std::to_string(dim_));
    }
    if (!std::all_of(values.begin(), values.end(), [](float v) { return std::isfinite(v); })) {
        throw DataError("row for `" + key + "` has non-finite values");
    }
    if (find(key)) {
        throw DataError("duplicate embedding key `" + key + "`");
    }
    keys_.push_back(std::move(key));
    data_.insert(data_.end(), values.begin(), values.end());
    sorted_index_.clear();
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view key) const {
    if (sorted_index_.size() != keys_.size()) {
        sorted_index_.resize(keys_.size());
        std::iota(sorted_index_.begin(), sorted_index_.end(), 0);
        std::sort(sorted_index_.begin(), sorted_index_.end(),
                  [&](std::size_t a, std::size_t b) { return keys_[a] < keys_[b]; });
    }
    auto it = std::lower_bound(sorted_index_.begin(), sorted_index_.end(), key,
                               [&](std::size_t i, std::string_view k) { return keys_[i] < k; });
    if (it != sorted_index_.end() && keys_[*it] == key) {
        return *it;
    }
    return std::nullopt;
}

void EmbeddingMatrix::save(const std::filesystem::path& path) const {
    EmbeddingWriter w(path, dim_);
    for (std::size_t i = 0; i < rows(); ++i) {
        w.write(keys_[i], row(i));
    }
    w.close();
}

EmbeddingMatrix EmbeddingMatrix::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open `" + path.string() + "`");
    }
    io::expect_magic(in, kEmbeddingMagic, path.string());
    const auto dim = io::read_le<std::uint32_t>(in, path.string());
    const auto rows = io::read_le<std::uint64_t>(in, path.string());
    EmbeddingMatrix m(dim, "");
    std::vector<float> buf(dim);
    for (std::uint64_t r = 0; r < rows; ++r) {
        const auto len = io::read_le<std::uint16_t>(in, path.string());
        std::string key(len, '\0');
        in.read(key.data(), len);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim * sizeof(float)));
        if (!in) {
            throw FormatError("`" + path.string() + "` is truncated at row " + std::to_string(r));
        }
        m.add_row(std::move(key), buf);
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("`" + path.string() + "` has trailing bytes after " + std::to_string(rows) + " rows");
    }
    return m;
}

EmbeddingWriter::EmbeddingWriter(const std::filesystem::path& path, std::size_t dim)
    : out_(path, std::ios::binary | std::ios::trunc), dim_(dim) {
    if (!out_) {
        throw IoError("cannot create `" + path.string() + "`");
    }
    io::write_magic(out_, kEmbeddingMagic);
    io::write_le<std::uint32_t>(out_, static_cast<std::uint32_t>(dim));
    io::write_le<std::uint64_t>(out_, 0);
}

EmbeddingWriter::~EmbeddingWriter() {
    try {
        close();
    } catch (...) {
    }
}

void EmbeddingWriter::write(std::string_view key, std::span<const float> values) {
    if (values.size() != dim_) {
        throw DataError("embedding row has wrong dimension");
    }
    if (key.size() > 0xFFFF) {
        throw DataError("embedding key longer than 65535 bytes");
    }
    io::write_le<std::uint16_t>(out_, static_cast<std::uint16_t>(key.size()));
    out_.write(key.data(), static_cast<std::streamsize>(key.size()));
    out_.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(dim_ * sizeof(float)));
    ++count_;
}

void EmbeddingWriter::close() {
    if (!out_.is_open()) {
        return;
    }
    out_.seekp(static_cast<std::streamoff>(sizeof(io::Magic) + sizeof(std::uint32_t)));
    io::write_le<std::uint64_t>(out_, count_);
    out_.close();
    if (out_.fail()) {
        throw IoError("failed writing embedding file");
    }
}

std::vector<float> pseudo_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
    SplitMix64 rng(mix_seed(fnv1a64(text), seed));
    std::vector<double> v(dim);
    double norm = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        norm += x * x;
    }
    norm = std::sqrt(norm);
    std::vector<float> out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out[i] = static_cast<float>(v[i] / norm);
    }
    return out;
}

std::string PseudoEmbeddingProvider::tag() const { return "pseudo/seed" + std::to_string(seed_); }

EmbedBatch PseudoEmbeddingProvider::embed(std::span<const std::string> texts) {
    EmbedBatch b;
    for (const auto& t : texts) {
        b.vectors.push_back(pseudo_embed(t, dim_, seed_));
        b.errors.emplace_back();
    }
    return b;
}

EmbedBatch ConstantProvider::embed(std::span<const std::string> texts) {
    EmbedBatch b;
    b.vectors.assign(texts.size(), std::vector<float>(dim_, value_));
    b.errors.assign(texts.size(), std::nullopt);
    return b;
}

namespace {

struct Pending {
    std::string key;
    std::string text;
};

// One provider call. Returns per-item vectors (empty on failure).
std::vector<std::optional<std::vector<float>>> call_provider(EmbeddingProvider& provider,
                                                             const std::vector<const Pending*>& items) {
    std::vector<std::string> texts;
    texts.reserve(items.size());
    for (const auto* p : items) {
        texts.push_back(p->text);
    }
    std::vector<std::optional<std::vector<float>>> out(items.size());
    EmbedBatch batch;
    try {
        batch = provider.embed(texts);
    } catch (const ProviderError&) {
        throw;
    } catch (const std::exception&) {
        return out;
    }
    if (batch.vectors.size() != items.size()) {
        return out;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i < batch.errors.size() && batch.errors[i]) {
            continue;
        }
        auto& v = batch.vectors[i];
        if (v.size() != provider.dim()) {
            throw ProviderError("provider `" + provider.tag() + "` returned a " + std::to_string(v.size()) +
                                "-dimensional vector, expected " + std::to_string(provider.dim()));
        }
        if (std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); })) {
            out[i] = std::move(v);
        }
    }
    return out;
}

}  // namespace

IngestResult ingest_embeddings(RecordSource<DomainTextBundle>& bundles, EmbeddingProvider& provider,
                               const IngestOptions& options, const std::optional<std::filesystem::path>& persist_to) {
    if (options.batch_size == 0) {
        throw ParameterError("batch size must be positive");
    }
    IngestResult result{EmbeddingMatrix(provider.dim(), provider.tag()), {}};
    std::optional<EmbeddingWriter> writer;
    if (persist_to) {
        writer.emplace(*persist_to, provider.dim());
    }

    std::vector<Pending> batch;
    const auto flush = [&] {
        std::vector<const Pending*> items;
        for (const auto& p : batch) {
            items.push_back(&p);
        }
        auto got = call_provider(provider, items);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            // Failed items are retried alone so one bad text cannot sink its batch.
            for (std::size_t attempt = 0; !got[i] && attempt < options.max_retries; ++attempt) {
                got[i] = std::move(call_provider(provider, {&batch[i]})[0]);
            }
            if (got[i]) {
                result.matrix.add_row(batch[i].key, *got[i]);
                if (writer) {
                    writer->write(batch[i].key, *got[i]);
                }
            } else {
                result.missing.push_back(batch[i].key);
            }
        }
        batch.clear();
    };

    while (auto b = bundles.next()) {
        batch.push_back(Pending{b->node.str(), std::move(b->merged_text)});
        if (batch.size() == options.batch_size) {
            flush();
        }
    }
    if (!batch.empty()) {
        flush();
    }
    if (writer) {
        writer->close();
    }
    return result;
}

EmbeddingMatrix mrl_truncate(const EmbeddingMatrix& matrix, std::size_t k) {
    if (k == 0 || k > matrix.dim()) {
        throw ParameterError("truncation dimension " + std::to_string(k) + " must be in 1.." +
                             std::to_string(matrix.dim()));
    }
    EmbeddingMatrix out(k, matrix.provider_tag() + "/mrl" + std::to_string(k));
    std::vector<float> buf(k);
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const auto row = matrix.row(r);
        double norm = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            norm += static_cast<double>(row[i]) * row[i];
        }
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < k; ++i) {
            buf[i] = norm > 0.0 ? static_cast<float>(row[i] / norm) : 0.0f;
        }
        out.add_row(matrix.keys()[r], buf);
    }
    return out;
}

}  // namespace credigraph
