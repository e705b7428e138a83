#include "credigraph/edge_file.hpp"

#include <algorithm>

namespace credigraph {
namespace {
constexpr std::size_t kBufferPairs = 1 << 15;
}

EdgeWriter::EdgeWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
        throw IoError("cannot create edge file `" + path.string() + "`");
    }
    io::write_magic(out_, kEdgeMagic);
    io::write_le<std::uint64_t>(out_, 0);
}

EdgeWriter::~EdgeWriter() {
    try {
        close();
    } catch (...) {
    }
}

void EdgeWriter::write(Edge e) {
    io::write_le(out_, e.src);
    io::write_le(out_, e.dst);
    ++count_;
}

void EdgeWriter::close() {
    if (!out_.is_open()) {
        return;
    }
    out_.seekp(8);
    io::write_le(out_, count_);
    out_.close();
    if (!out_) {
        throw IoError("write failed on edge file `" + path_.string() + "`");
    }
}

EdgeReader::EdgeReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) {
        throw IoError("cannot open edge file `" + path.string() + "`");
    }
    io::expect_magic(in_, kEdgeMagic, path.string());
    count_ = io::read_le<std::uint64_t>(in_, "edge count");
    const auto size = std::filesystem::file_size(path);
    if (size != 16 + 16 * count_) {
        throw FormatError("edge file `" + path.string() + "` declares " + std::to_string(count_) +
                          " edges but holds " + std::to_string(size) + " bytes");
    }
}

void EdgeReader::refill() {
    const std::uint64_t remaining_pairs = count_ - read_;
    const std::size_t pairs = static_cast<std::size_t>(std::min<std::uint64_t>(remaining_pairs, kBufferPairs));
    buffer_.resize(pairs * 2);
    in_.read(reinterpret_cast<char*>(buffer_.data()), static_cast<std::streamsize>(pairs * 16));
    if (in_.gcount() != static_cast<std::streamsize>(pairs * 16)) {
        throw FormatError("truncated edge file");
    }
    pos_ = 0;
}

std::optional<Edge> EdgeReader::next() {
    if (read_ >= count_) {
        return std::nullopt;
    }
    if (pos_ >= buffer_.size()) {
        refill();
    }
    Edge e{buffer_[pos_], buffer_[pos_ + 1]};
    pos_ += 2;
    ++read_;
    return e;
}

std::vector<Edge> read_all_edges(const std::filesystem::path& path) {
    EdgeReader reader(path);
    std::vector<Edge> edges;
    edges.reserve(reader.count());
    while (auto e = reader.next()) {
        edges.push_back(*e);
    }
    return edges;
}

void write_edges(const std::filesystem::path& path, std::span<const Edge> edges) {
    EdgeWriter writer(path);
    for (const Edge& e : edges) {
        writer.write(e);
    }
    writer.close();
}

DictionaryReader::DictionaryReader(const std::filesystem::path& path) : in_(path) {
    if (!in_) {
        throw IoError("cannot open dictionary `" + path.string() + "`");
    }
    std::string header;
    if (!std::getline(in_, header) || header != kDictionaryHeader) {
        throw FormatError("`" + path.string() + "` is not a CGDICT1 dictionary (bad or missing version header)");
    }
}

std::optional<std::string> DictionaryReader::next() {
    std::string line;
    if (!std::getline(in_, line)) {
        return std::nullopt;
    }
    ++next_id_;
    return line;
}

NodeDictionary::NodeDictionary(std::vector<std::string> sorted_keys) : keys_(std::move(sorted_keys)) {
    for (std::size_t i = 1; i < keys_.size(); ++i) {
        if (!(keys_[i - 1] < keys_[i])) {
            throw FormatError("dictionary keys are not strictly increasing at id " + std::to_string(i));
        }
    }
}

NodeDictionary NodeDictionary::load(const std::filesystem::path& path) {
    DictionaryReader reader(path);
    std::vector<std::string> keys;
    while (auto k = reader.next()) {
        keys.push_back(std::move(*k));
    }
    return NodeDictionary(std::move(keys));
}

void NodeDictionary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot create dictionary `" + path.string() + "`");
    }
    out << kDictionaryHeader << '\n';
    for (const auto& k : keys_) {
        out << k << '\n';
    }
}

std::optional<NodeId> NodeDictionary::find(std::string_view key) const noexcept {
    const auto it = std::lower_bound(keys_.begin(), keys_.end(), key,
                                     [](const std::string& a, std::string_view b) { return a < b; });
    if (it == keys_.end() || *it != key) {
        return std::nullopt;
    }
    return static_cast<NodeId>(it - keys_.begin());
}

}  // namespace credigraph
