// Verifies that the steady-state data path (sketch updates and queries)
// performs no heap allocation once a sketch is constructed. Runs as its
// own binary so the counters see only this translation unit's activity.

#include <cstdio>
#include <cstdlib>
#include <new>

#include "codp/plain_sketch.hpp"
#include "codp/private_sketch.hpp"

namespace {

std::size_t g_news = 0;
bool g_counting = false;

}  // namespace

void* operator new(std::size_t size) {
    if (g_counting) ++g_news;
    void* p = std::malloc(size);
    if (!p) throw std::bad_alloc();
    return p;
}

void* operator new[](std::size_t size) { return ::operator new(size); }

void operator delete(void* p) noexcept { std::free(p); }
void operator delete[](void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }
void operator delete[](void* p, std::size_t) noexcept { std::free(p); }

namespace {

int g_failures = 0;

void expect_zero(const char* what, std::size_t count) {
    if (count == 0) {
        std::printf("[ok] %s: no allocations\n", what);
    } else {
        std::printf("[FAIL] %s: %zu allocations\n", what, count);
        ++g_failures;
    }
}

template <typename Fn>
std::size_t count_allocs(Fn&& fn) {
    g_news = 0;
    g_counting = true;
    fn();
    g_counting = false;
    return g_news;
}

}  // namespace

int main() {
    using namespace codp;
    const std::uint64_t T = 4096;
    double sink = 0.0;

    PlainSketch plain(SketchKind::CountSketch, 4, 64, 11);
    PunctualSketch punctual(SketchKind::CountMin, 3, 16, T, PrivacyParams{0.5, 1e-3}, 12);
    LazySketch lazy(SketchKind::CountSketch, 3, 32, T, PrivacyParams{0.5, 1e-3}, 13);

    // warm up once so lazily-initialized state settles
    for (std::uint64_t t = 0; t < 64; ++t) {
        plain.update(t % 97, 1);
        punctual.update(t % 97);
        lazy.update(t % 97);
    }
    sink += static_cast<double>(plain.query(3)) + punctual.query(3) + lazy.query(3);

    expect_zero("plain update+query", count_allocs([&] {
        for (std::uint64_t t = 0; t < 2000; ++t) {
            plain.update(t % 97, 1);
            sink += static_cast<double>(plain.query(t % 97));
        }
    }));

    expect_zero("punctual update+query", count_allocs([&] {
        for (std::uint64_t t = 0; t < 2000; ++t) {
            punctual.update(t % 97);
            sink += punctual.query(t % 97);
        }
    }));

    expect_zero("lazy update+query", count_allocs([&] {
        for (std::uint64_t t = 0; t < 2000; ++t) {
            lazy.update(t % 97);
            sink += lazy.query(t % 97);
        }
    }));

    if (sink == -1.0) std::printf("unreachable %f\n", sink);
    if (g_failures) {
        std::printf("%d allocation check(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all allocation checks passed\n");
    return 0;
}
