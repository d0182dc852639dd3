#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "codp/plain_sketch.hpp"
#include "codp/streamgen.hpp"
#include "doctest.h"

using namespace codp;

namespace {

// chi-square 0.999 quantile at 63 degrees of freedom, for w=64 bucket tests.
constexpr double kChi2_999_63 = 103.44237731987313547;

std::vector<std::uint64_t> scrambled_keys(std::uint64_t seed, std::size_t n) {
    std::vector<std::uint64_t> keys(n);
    std::uint64_t s = seed;
    for (auto& k : keys) k = splitmix64(s);
    return keys;
}

}  // namespace

TEST_CASE("lower_median picks index (d-1)/2 of the sorted readings") {
    std::array<std::int64_t, kMaxDepth> v{};
    v[0] = 5;
    CHECK(lower_median(v, 1) == 5);
    v = {};
    v[0] = 9;
    v[1] = 2;
    CHECK(lower_median(v, 2) == 2);
    v = {};
    v[0] = 7;
    v[1] = 1;
    v[2] = 4;
    CHECK(lower_median(v, 3) == 4);
    v = {};
    v[0] = 10;
    v[1] = -3;
    v[2] = 2;
    v[3] = 8;
    CHECK(lower_median(v, 4) == 2);
    v = {};
    v[0] = 1;
    v[1] = 1;
    v[2] = 50;
    v[3] = -2;
    v[4] = 0;
    CHECK(lower_median(v, 5) == 1);
}

TEST_CASE("make_rows is deterministic in the seed and distinct across rows") {
    const auto a = make_rows(42, 5, 128);
    const auto b = make_rows(42, 5, 128);
    const auto c = make_rows(43, 5, 128);
    REQUIRE(a.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(a[i].index_mul == b[i].index_mul);
        CHECK(a[i].index_add == b[i].index_add);
        CHECK(a[i].sign_mul == b[i].sign_mul);
        CHECK(a[i].sign_add == b[i].sign_add);
        CHECK(a[i].width == 128);
        CHECK(a[i].index_mul % 2 == 1);
        CHECK(a[i].sign_mul % 2 == 1);
    }
    CHECK(a[0].index_mul != c[0].index_mul);
    CHECK(a[0].index_mul != a[1].index_mul);
}

TEST_CASE("row index hashing is uniform across 64 buckets (chi-square)") {
    const std::uint64_t w = 64;
    const std::size_t n = 64000;
    const double expected = static_cast<double>(n) / static_cast<double>(w);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        const auto rows = make_rows(seed, 1, w);
        std::vector<std::uint64_t> counts(w, 0);
        const auto keys = scrambled_keys(seed * 977 + 11, n);
        for (const auto k : keys) ++counts[rows[0].index(k)];
        double chi2 = 0.0;
        for (const auto c : counts) {
            const double d = static_cast<double>(c) - expected;
            chi2 += d * d / expected;
        }
        CAPTURE(seed);
        CHECK(chi2 < kChi2_999_63);
    }
}

TEST_CASE("row index hashing stays uniform on sequential keys") {
    const std::uint64_t w = 64;
    const std::size_t n = 64000;
    const double expected = static_cast<double>(n) / static_cast<double>(w);
    const auto rows = make_rows(7, 1, w);
    std::vector<std::uint64_t> counts(w, 0);
    for (std::uint64_t k = 0; k < n; ++k) ++counts[rows[0].index(k)];
    double chi2 = 0.0;
    for (const auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    CHECK(chi2 < kChi2_999_63);
}

TEST_CASE("row signs are balanced and index stays in range") {
    const std::size_t n = 100000;
    const auto rows = make_rows(11, 3, 37);
    const auto keys = scrambled_keys(99, n);
    for (const auto& row : rows) {
        std::int64_t sum = 0;
        for (const auto k : keys) {
            const int s = row.sign(k);
            REQUIRE((s == 1 || s == -1));
            sum += s;
            REQUIRE(row.index(k) < 37);
        }
        // 4.5 binomial standard deviations (sd = sqrt(n) ~ 316).
        CHECK(std::abs(sum) < 1450);
    }
}

TEST_CASE("negated rows flip the sign hash and nothing else") {
    const auto rows = make_rows(5, 2, 16);
    const auto neg = rows[0].negated();
    for (std::uint64_t k = 0; k < 1000; ++k) {
        CHECK(neg.sign(k) == -rows[0].sign(k));
        CHECK(neg.index(k) == rows[0].index(k));
    }
    CHECK(neg.negated().sign(123) == rows[0].sign(123));
}

TEST_CASE("count-min never underestimates and is exact without collisions") {
    PlainSketch cms(SketchKind::CountMin, 4, 512, 17);
    ExactOracle oracle;
    const auto stream = zipf_stream({1.3, 400, 20000, 31});
    for (const auto k : stream) {
        cms.update(k);
        oracle.add(k);
    }
    CHECK(cms.t_now() == 20000);
    for (std::uint64_t k = 0; k < 400; ++k)
        CHECK(cms.query(k) >= oracle.frequency(k));
    // A fresh key hashes into occupied cells, so even f=0 may read positive.
    CHECK(cms.query(1ull << 60) >= 0);

    PlainSketch wide(SketchKind::CountMin, 2, 1 << 16, 17);
    wide.update(77, 5);
    wide.update(78, 2);
    CHECK(wide.query(77) == 5);
    CHECK(wide.query(78) == 2);
}

TEST_CASE("count-min rejects non-positive weights") {
    PlainSketch cms(SketchKind::CountMin, 2, 8, 1);
    CHECK_THROWS_AS(cms.update(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(cms.update(1, -3), std::invalid_argument);
    PlainSketch cs(SketchKind::CountSketch, 2, 8, 1);
    cs.update(1, -3);
    cs.update(1, 3);
    CHECK(cs.query(1) == 0);
}

TEST_CASE("sketch constructor validation") {
    CHECK_THROWS_AS(PlainSketch(SketchKind::CountMin, 0, 8, 1), std::invalid_argument);
    CHECK_THROWS_AS(PlainSketch(SketchKind::CountMin, 65, 8, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_rows(1, 3, 0), std::invalid_argument);
    auto rows = make_rows(1, 3, 8);
    rows[1].width = 16;
    CHECK_THROWS_AS(PlainSketch(SketchKind::CountMin, rows), std::invalid_argument);
}

TEST_CASE("width-1 count-min collapses to a total counter") {
    PlainSketch cms(SketchKind::CountMin, 3, 1, 9);
    std::int64_t total = 0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        cms.update(k, static_cast<std::int64_t>(k % 4) + 1);
        total += static_cast<std::int64_t>(k % 4) + 1;
    }
    CHECK(cms.query(12345) == total);
}

TEST_CASE("count-min rows conserve total weight") {
    PlainSketch cms(SketchKind::CountMin, 5, 64, 3);
    std::int64_t total = 0;
    std::uint64_t s = 4;
    for (int i = 0; i < 5000; ++i) {
        const std::int64_t w = static_cast<std::int64_t>(splitmix64(s) % 7) + 1;
        cms.update(splitmix64(s) % 1000, w);
        total += w;
    }
    for (int i = 0; i < cms.depth(); ++i) CHECK(cms.row_sum(i) == total);
}

TEST_CASE("count sketch error obeys the sqrt(3 F2 / w) bound on frequent keys") {
    const std::uint64_t w = 256;
    const int d = 7;
    int checked = 0;
    int ok = 0;
    for (std::uint64_t seed : {101ull, 102ull, 103ull, 104ull, 105ull}) {
        PlainSketch cs(SketchKind::CountSketch, d, w, seed);
        ExactOracle oracle;
        for (const auto k : zipf_stream({1.3, 2000, 40000, seed + 7})) {
            cs.update(k);
            oracle.add(k);
        }
        const double bound = std::sqrt(3.0 * static_cast<double>(oracle.f2()) / static_cast<double>(w));
        for (const auto& [key, freq] : oracle.topk(15)) {
            ++checked;
            if (std::abs(static_cast<double>(cs.query(key) - freq)) <= bound) ++ok;
        }
    }
    CHECK(checked == 75);
    // Chebyshev per row plus the median makes per-key failure rare; allow a
    // small number of exceedances across the 75 checks.
    CHECK(ok >= 71);
}

TEST_CASE("count-min overestimate stays within 2 F1 / w on frequent keys") {
    const std::uint64_t w = 512;
    const int d = 6;
    PlainSketch cms(SketchKind::CountMin, d, w, 211);
    ExactOracle oracle;
    for (const auto k : zipf_stream({1.3, 2000, 60000, 53})) {
        cms.update(k);
        oracle.add(k);
    }
    const double bound = 2.0 * static_cast<double>(oracle.f1()) / static_cast<double>(w);
    for (const auto& [key, freq] : oracle.topk(15)) {
        const std::int64_t err = cms.query(key) - freq;
        CHECK(err >= 0);
        CHECK(static_cast<double>(err) <= bound);
    }
}

TEST_CASE("single-row count sketch is unbiased across hash seeds") {
    // Fixed stream, 240 independent hash seeds: the mean estimate of a
    // mid-frequency key must sit within 3 standard errors of its count.
    const auto stream = zipf_stream({1.1, 500, 8000, 77});
    ExactOracle oracle;
    for (const auto k : stream) oracle.add(k);
    const auto target = oracle.topk(8).back();
    std::vector<double> estimates;
    for (std::uint64_t seed = 0; seed < 240; ++seed) {
        PlainSketch cs(SketchKind::CountSketch, 1, 32, seed * 31 + 5);
        for (const auto k : stream) cs.update(k);
        estimates.push_back(static_cast<double>(cs.query(target.first)));
    }
    const double n = static_cast<double>(estimates.size());
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / n;
    double var = 0.0;
    for (const auto e : estimates) var += (e - mean) * (e - mean);
    var /= n - 1.0;
    const double se = std::sqrt(var / n);
    CAPTURE(mean);
    CAPTURE(target.second);
    CHECK(std::abs(mean - static_cast<double>(target.second)) <= 3.0 * se);
}

TEST_CASE("count sketch estimates are invariant under sign negation") {
    const auto rows = make_rows(303, 5, 64);
    std::vector<HashRow> flipped;
    for (const auto& r : rows) flipped.push_back(r.negated());
    PlainSketch a(SketchKind::CountSketch, rows);
    PlainSketch b(SketchKind::CountSketch, flipped);
    const auto stream = zipf_stream({1.5, 300, 10000, 9});
    for (const auto k : stream) {
        a.update(k);
        b.update(k);
    }
    for (std::uint64_t k = 0; k < 300; ++k) {
        CHECK(a.query(k) == b.query(k));
        CHECK(a.cell(2, k % 64) == -b.cell(2, k % 64));
    }
}

TEST_CASE("heap heavy hitters tracks at most k keys and reports above t/k") {
    // Wide sketch => exact estimates, so the heap behaviour is deterministic.
    HeapHeavyHitters hh(4, 2, 1 << 16, 5);
    // counts: 9 -> 40, 5 -> 30, 3 -> 20, 7 -> 6, 1 -> 4 (t = 100)
    std::vector<std::uint64_t> stream;
    auto emit = [&](std::uint64_t key, int count) {
        for (int i = 0; i < count; ++i) stream.push_back(key);
    };
    emit(9, 40);
    emit(5, 30);
    emit(3, 20);
    emit(7, 6);
    emit(1, 4);
    std::uint64_t s = 12;
    for (std::size_t i = stream.size() - 1; i > 0; --i)
        std::swap(stream[i], stream[splitmix64(s) % (i + 1)]);
    for (const auto k : stream) hh.update(k);
    CHECK(hh.tracked() <= 4);
    // threshold t/k = 25: only keys 9 and 5 qualify.
    const auto rep = hh.report(100);
    REQUIRE(rep.size() == 2);
    CHECK(rep[0].first == 9);
    CHECK(rep[0].second == 40);
    CHECK(rep[1].first == 5);
    CHECK(rep[1].second == 30);
    // Lower threshold pulls in key 3 as well.
    CHECK(hh.report(80).size() == 3);
}

TEST_CASE("heap heavy hitters report breaks ties by smaller key") {
    HeapHeavyHitters hh(8, 2, 1 << 16, 6);
    for (int i = 0; i < 10; ++i) {
        hh.update(42);
        hh.update(7);
        hh.update(19);
    }
    const auto rep = hh.report(30);
    REQUIRE(rep.size() == 3);
    CHECK(rep[0].first == 7);
    CHECK(rep[1].first == 19);
    CHECK(rep[2].first == 42);
    CHECK(rep[0].second == 10);
}

TEST_CASE("heap heavy hitters evicts the lowest estimate when full") {
    HeapHeavyHitters hh(2, 2, 1 << 16, 8);
    hh.update(1);
    hh.update(1);
    hh.update(2);
    CHECK(hh.tracked() == 2);
    // key 3 arrives once: est 1 is not above the lowest tracked est (1), so
    // the set is unchanged.
    hh.update(3);
    CHECK(hh.report(0).size() == 2);
    auto rep = hh.report(0);
    CHECK(rep[0].first == 1);
    // a second arrival of 3 beats key 2's single count.
    hh.update(3);
    rep = hh.report(0);
    REQUIRE(rep.size() == 2);
    CHECK(rep[0].first == 1);
    CHECK(rep[1].first == 3);
    CHECK_THROWS_AS(HeapHeavyHitters(0, 2, 8, 1), std::invalid_argument);
}
