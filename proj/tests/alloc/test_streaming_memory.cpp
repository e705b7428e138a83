// Peak heap use of the streaming paths must not grow with input size.

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <new>

#include "credigraph/archive.hpp"
#include "credigraph/degree.hpp"
#include "credigraph/external_sort.hpp"
#include "oracles.hpp"

namespace {

std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};
constexpr std::size_t kHeader = alignof(std::max_align_t);

void* tracked_alloc(std::size_t n) {
    auto* p = static_cast<unsigned char*>(std::malloc(n + kHeader));
    if (p == nullptr) throw std::bad_alloc();
    *reinterpret_cast<std::size_t*>(p) = n;
    const auto live = g_live.fetch_add(n) + n;
    auto peak = g_peak.load();
    while (live > peak && !g_peak.compare_exchange_weak(peak, live)) {
    }
    return p + kHeader;
}

void tracked_free(void* q) noexcept {
    if (q == nullptr) return;
    auto* p = static_cast<unsigned char*>(q) - kHeader;
    g_live.fetch_sub(*reinterpret_cast<std::size_t*>(p));
    std::free(p);
}

// Peak bytes above the live level at the start of the scope.
class PeakScope {
   public:
    PeakScope() : base_(g_live.load()) { g_peak.store(base_); }
    [[nodiscard]] std::size_t extra() const { return g_peak.load() - base_; }

   private:
    std::size_t base_;
};

}  // namespace

void* operator new(std::size_t n) { return tracked_alloc(n); }
void* operator new[](std::size_t n) { return tracked_alloc(n); }
void operator delete(void* p) noexcept { tracked_free(p); }
void operator delete[](void* p) noexcept { tracked_free(p); }
void operator delete(void* p, std::size_t) noexcept { tracked_free(p); }
void operator delete[](void* p, std::size_t) noexcept { tracked_free(p); }

using namespace credigraph;

namespace {

std::size_t archive_peak(std::size_t records) {
    oracle::TempDir dir;
    {
        ArchiveWriter w(dir / "big.wat.gz", true);
        WarcRecord r;
        r.headers = {{"WARC-Type", "metadata"}, {"WARC-Target-URI", "https://e.com/"}, {"WARC-Date", "2024-12-02T00:00:00Z"}};
        r.payload = std::string(4096, 'p');
        for (std::size_t i = 0; i < records; ++i) w.write(r);
    }
    PeakScope scope;
    ArchiveReader reader(dir / "big.wat.gz");
    std::size_t n = 0;
    while (auto rec = reader.next()) ++n;
    EXPECT_EQ(n, records);
    return scope.extra();
}

std::size_t degree_peak(std::uint64_t edges) {
    oracle::TempDir dir;
    const std::uint64_t n = 1000;
    {
        EdgeWriter w(dir / "e.cgedge");
        oracle::SplitMix64 rng(1);
        for (std::uint64_t i = 0; i < edges; ++i) w.write({rng.below(n), rng.below(n)});
    }
    PeakScope scope;
    auto table = compute_degrees(dir / "e.cgedge", n, dir / "d.cgdeg");
    auto filtered = filter_by_degree(dir / "e.cgedge", table, 3, {.edges = dir / "f.cgedge"});
    EXPECT_GT(filtered.edge_count, 0u);
    return scope.extra();
}

}  // namespace

TEST(StreamingMemory, ArchiveReaderIsFlat) {
    const auto small = archive_peak(200);
    const auto large = archive_peak(4000);  // ~16 MB of payload
    EXPECT_LT(large, 1u << 20);
    EXPECT_LE(large, small + (64u << 10));
}

TEST(StreamingMemory, DegreePassIsFlat) {
    const auto small = degree_peak(50'000);
    const auto large = degree_peak(1'000'000);  // 16 MB edge file
    EXPECT_LT(large, 2u << 20);
    EXPECT_LE(large, small + (64u << 10));
}

TEST(StreamingMemory, ExternalSortRespectsBudget) {
    oracle::TempDir dir;
    SortOptions opt;
    opt.memory_budget_bytes = 256 << 10;
    opt.max_fan_in = 8;
    PeakScope scope;
    {
        ExternalSorter<std::string, StringCodec> sorter(dir.path(), opt);
        oracle::SplitMix64 rng(2);
        for (int i = 0; i < 200'000; ++i) sorter.add("key" + std::to_string(rng.next()));
        EXPECT_GT(sorter.spilled_runs(), 8u);
        auto src = sorter.finish();
        std::string prev;
        std::size_t count = 0;
        while (auto s = src->next()) {
            ASSERT_LE(prev, *s);
            prev = std::move(*s);
            ++count;
        }
        EXPECT_EQ(count, 200'000u);
    }
    // Buffer budget plus per-run stream buffers and bookkeeping.
    EXPECT_LT(scope.extra(), 2u << 20);
}
