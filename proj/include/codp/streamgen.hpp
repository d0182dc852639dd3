#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codp/noise.hpp"

namespace codp {

struct ZipfSpec {
    double skew = 1.3;
    std::uint64_t universe = 1'000'000;
    std::uint64_t length = 1 << 20;
    std::uint64_t seed = 1;
};

// Zipf(skew) sampler over ranks 1..n via inverse-CDF table lookup. Ranks
// are the keys; same spec means the same key sequence, always.
class ZipfGenerator {
  public:
    explicit ZipfGenerator(const ZipfSpec& spec);

    std::uint64_t next();
    double probability(std::uint64_t rank) const;
    const ZipfSpec& spec() const { return spec_; }

  private:
    ZipfSpec spec_;
    std::vector<double> cdf_;
    Xoshiro256pp rng_;
};

std::vector<std::uint64_t> zipf_stream(const ZipfSpec& spec);

// FNV-1a, the fixed token hash for text traces.
inline std::uint64_t fnv1a64(std::string_view token) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : token) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Reads a newline-delimited token trace and hashes each token to a 64-bit
// key, preserving order. max_arrivals = 0 means the whole file.
std::vector<std::uint64_t> trace_stream(const std::string& path, std::uint64_t max_arrivals = 0);

// Exact frequency dictionary with running F1 and F2 moments.
class ExactOracle {
  public:
    void add(std::uint64_t key, std::int64_t weight = 1);

    std::int64_t frequency(std::uint64_t key) const;
    std::uint64_t arrivals() const { return t_; }
    std::int64_t f1() const { return f1_; }
    std::int64_t f2() const { return f2_; }
    std::size_t distinct() const { return counts_.size(); }
    const std::unordered_map<std::uint64_t, std::int64_t>& counts() const { return counts_; }

    // Top k by frequency, ties broken toward the smaller key.
    std::vector<std::pair<std::uint64_t, std::int64_t>> topk(std::size_t k) const;

    // Keys with frequency >= arrivals/k.
    std::vector<std::uint64_t> heavy_set(int k) const;

  private:
    std::unordered_map<std::uint64_t, std::int64_t> counts_;
    std::uint64_t t_ = 0;
    std::int64_t f1_ = 0;
    std::int64_t f2_ = 0;
};

// Synthetic packet-trace fixture: a handful of planted heavy keys with
// exact planted frequencies over a flat-tailed Zipf background, with a
// deliberate frequency gap between the two. The planted keys are exactly
// the frequency >= T/32 set, and nothing else comes near the band, which
// keeps precision/recall evaluations on the fixture stable across seeds.
struct FixtureSpec {
    std::uint64_t length = 1ull << 22;
    std::uint64_t seed = 1;
    std::uint64_t bg_universe = 360'000;
    double bg_skew = 0.75;
};

inline const std::vector<double>& fixture_heavy_fractions() {
    static const std::vector<double> f = {0.13, 0.10, 0.085, 0.075, 0.068, 0.062, 0.057, 0.053};
    return f;
}

std::string fixture_heavy_token(std::size_t i);
std::string fixture_background_token(std::uint64_t rank);

// The arrival sequence as hashed keys, identical to hashing the written
// trace line by line.
std::vector<std::uint64_t> fixture_keys(const FixtureSpec& spec);

void write_fixture(const FixtureSpec& spec, const std::string& path);
void write_zipf_trace(const ZipfSpec& spec, const std::string& path);

}  // namespace codp
