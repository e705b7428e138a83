#include "credigraph/degree.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

namespace credigraph {

MappedFile::MappedFile(const std::filesystem::path& path, bool writable) : writable_(writable) {
    const int fd = ::open(path.c_str(), writable ? O_RDWR : O_RDONLY);
    if (fd < 0) {
        throw IoError("cannot open `" + path.string() + "`: " + std::strerror(errno));
    }
    struct stat st {};
    if (::fstat(fd, &st) != 0) {
        ::close(fd);
        throw IoError("cannot stat `" + path.string() + "`");
    }
    size_ = static_cast<std::size_t>(st.st_size);
    if (size_ > 0) {
        void* p = ::mmap(nullptr, size_, writable ? PROT_READ | PROT_WRITE : PROT_READ, MAP_SHARED, fd, 0);
        if (p == MAP_FAILED) {
            ::close(fd);
            throw IoError("cannot map `" + path.string() + "`: " + std::strerror(errno));
        }
        data_ = static_cast<std::byte*>(p);
    }
    ::close(fd);
}

MappedFile::~MappedFile() { release(); }

MappedFile::MappedFile(MappedFile&& other) noexcept
    : data_(std::exchange(other.data_, nullptr)),
      size_(std::exchange(other.size_, 0)),
      writable_(other.writable_) {}

MappedFile& MappedFile::operator=(MappedFile&& other) noexcept {
    if (this != &other) {
        release();
        data_ = std::exchange(other.data_, nullptr);
        size_ = std::exchange(other.size_, 0);
        writable_ = other.writable_;
    }
    return *this;
}

void MappedFile::release() noexcept {
    if (data_ != nullptr) {
        ::munmap(data_, size_);
        data_ = nullptr;
    }
}

// ---------------------------------------------------------------------------

DegreeTable::DegreeTable(std::filesystem::path path, MappedFile map) : path_(std::move(path)), map_(std::move(map)) {
    const auto bytes = map_.bytes();
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kDegreeMagic.data(), 8) != 0) {
        throw FormatError("`" + path_.string() + "` is not a CGDEG1 file (bad or missing version header)");
    }
    std::memcpy(&n_, bytes.data() + 8, 8);
    if (bytes.size() != 16 + 8 * n_) {
        throw FormatError("degree file `" + path_.string() + "` size disagrees with its node count");
    }
    in_ = reinterpret_cast<std::uint32_t*>(bytes.data() + 16);
    out_ = in_ + n_;
}

DegreeTable DegreeTable::create(const std::filesystem::path& path, std::uint64_t n) {
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot create degree file `" + path.string() + "`");
        }
        io::write_magic(out, kDegreeMagic);
        io::write_le(out, n);
    }
    // Sparse extension: zero pages are materialised lazily by the kernel.
    std::filesystem::resize_file(path, 16 + 8 * n);
    return DegreeTable(path, MappedFile(path, true));
}

DegreeTable DegreeTable::open(const std::filesystem::path& path) { return DegreeTable(path, MappedFile(path, false)); }

void DegreeTable::add_edge(NodeId src, NodeId dst) noexcept {
    constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
    if (out_[src] != kMax) ++out_[src];
    if (in_[dst] != kMax) ++in_[dst];
}

DegreeTable compute_degrees(const std::filesystem::path& edges, std::uint64_t n,
                            const std::filesystem::path& degree_file) {
    EdgeReader reader(edges);
    DegreeTable table = DegreeTable::create(degree_file, n);
    while (true) {
        const std::uint64_t offset = reader.offset();
        const auto e = reader.next();
        if (!e) {
            break;
        }
        if (e->src >= n || e->dst >= n) {
            throw CorruptInputError("edge (" + std::to_string(e->src) + ", " + std::to_string(e->dst) +
                                        ") references a node id >= " + std::to_string(n),
                                    offset);
        }
        table.add_edge(e->src, e->dst);
    }
    return table;
}

// ---------------------------------------------------------------------------

SurvivorSet::SurvivorSet(std::uint64_t n) : n_(n), words_((n + 63) / 64, 0) {}

void SurvivorSet::build_rank() {
    rank_.resize(words_.size());
    std::uint64_t running = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        rank_[i] = running;
        running += static_cast<std::uint64_t>(std::popcount(words_[i]));
    }
    count_ = running;
}

NodeId SurvivorSet::rank(NodeId v) const noexcept {
    const std::uint64_t word = words_[v >> 6];
    const std::uint64_t below = (v & 63) == 0 ? 0 : word & ((std::uint64_t{1} << (v & 63)) - 1);
    return rank_[v >> 6] + static_cast<std::uint64_t>(std::popcount(below));
}

bool passes_threshold(std::uint64_t degree, std::int64_t threshold, DegreeComparison comparison) noexcept {
    const auto t = static_cast<std::uint64_t>(threshold);
    return comparison == DegreeComparison::kGreater ? degree > t : degree >= t;
}

FilteredGraph filter_by_degree(const std::filesystem::path& edges, const DegreeTable& degrees,
                               std::int64_t threshold, const FilterOutputs& outputs,
                               DegreeComparison comparison, std::string source_snapshot) {
    if (threshold < 0) {
        throw ParameterError("degree threshold must be >= 0, got " + std::to_string(threshold));
    }
    FilteredGraph result;
    result.threshold = threshold;
    result.comparison = comparison;
    result.source_snapshot = std::move(source_snapshot);
    result.survivors = SurvivorSet(degrees.size());
    for (NodeId v = 0; v < degrees.size(); ++v) {
        if (passes_threshold(degrees.total(v), threshold, comparison)) {
            result.survivors.set(v);
        }
    }
    result.survivors.build_rank();

    EdgeReader reader(edges);
    EdgeWriter writer(outputs.edges);
    const std::uint64_t n = degrees.size();
    while (true) {
        const std::uint64_t offset = reader.offset();
        const auto e = reader.next();
        if (!e) {
            break;
        }
        if (e->src >= n || e->dst >= n) {
            throw CorruptInputError("edge references a node id >= " + std::to_string(n), offset);
        }
        if (result.survivors.contains(e->src) && result.survivors.contains(e->dst)) {
            writer.write(Edge{result.survivors.rank(e->src), result.survivors.rank(e->dst)});
        }
    }
    writer.close();
    result.edge_count = writer.count();

    if (!outputs.compact_map.empty()) {
        std::ofstream map(outputs.compact_map, std::ios::trunc);
        if (!map) {
            throw IoError("cannot create compact map `" + outputs.compact_map.string() + "`");
        }
        for (NodeId v = 0; v < n; ++v) {
            if (result.survivors.contains(v)) {
                map << v << '\t' << result.survivors.rank(v) << '\n';
            }
        }
    }
    if (!outputs.dictionary_in.empty() && !outputs.dictionary_out.empty()) {
        DictionaryReader dict(outputs.dictionary_in);
        std::ofstream out(outputs.dictionary_out, std::ios::trunc);
        if (!out) {
            throw IoError("cannot create dictionary `" + outputs.dictionary_out.string() + "`");
        }
        out << kDictionaryHeader << '\n';
        NodeId v = 0;
        while (auto key = dict.next()) {
            if (v >= n) {
                throw DataError("dictionary has more keys than the degree table");
            }
            if (result.survivors.contains(v)) {
                out << *key << '\n';
            }
            ++v;
        }
        if (v != n) {
            throw DataError("dictionary has " + std::to_string(v) + " keys, degree table " + std::to_string(n));
        }
    }
    return result;
}

namespace {
double round2(double x) { return std::round(x * 100.0) / 100.0; }
std::string two_decimals(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}
}  // namespace

std::string RetentionReport::edge_text() const { return two_decimals(edge_retention_pct); }
std::string RetentionReport::node_text() const { return two_decimals(node_retention_pct); }

RetentionReport filter_report(GraphCounts raw, GraphCounts filtered) {
    if (raw.nodes == 0 || raw.edges == 0) {
        throw DataError("retention is undefined for a raw graph with zero nodes or edges");
    }
    return RetentionReport{
        round2(100.0 * static_cast<double>(filtered.edges) / static_cast<double>(raw.edges)),
        round2(100.0 * static_cast<double>(filtered.nodes) / static_cast<double>(raw.nodes)),
    };
}

}  // namespace credigraph
