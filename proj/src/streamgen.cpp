#include "codp/streamgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace codp {

ZipfGenerator::ZipfGenerator(const ZipfSpec& spec) : spec_(spec), rng_(spec.seed) {
    if (!(spec.skew > 0.0)) throw std::invalid_argument("zipf skew must be > 0");
    if (spec.universe < 1) throw std::invalid_argument("zipf universe must be >= 1");
    cdf_.resize(spec.universe);
    double acc = 0.0;
    for (std::uint64_t r = 1; r <= spec.universe; ++r) {
        acc += std::pow(static_cast<double>(r), -spec.skew);
        cdf_[r - 1] = acc;
    }
    for (auto& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
}

std::uint64_t ZipfGenerator::next() {
    const double u = rng_.next_unit();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint64_t>(it - cdf_.begin()) + 1;
}

double ZipfGenerator::probability(std::uint64_t rank) const {
    if (rank < 1 || rank > spec_.universe) return 0.0;
    const double lo = rank == 1 ? 0.0 : cdf_[rank - 2];
    return cdf_[rank - 1] - lo;
}

std::vector<std::uint64_t> zipf_stream(const ZipfSpec& spec) {
    ZipfGenerator gen(spec);
    std::vector<std::uint64_t> keys(spec.length);
    for (auto& k : keys) k = gen.next();
    return keys;
}

std::vector<std::uint64_t> trace_stream(const std::string& path, std::uint64_t max_arrivals) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace: " + path);
    std::vector<std::uint64_t> keys;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        keys.push_back(fnv1a64(line));
        if (max_arrivals != 0 && keys.size() == max_arrivals) break;
    }
    if (keys.empty()) throw std::runtime_error("trace has no tokens: " + path);
    return keys;
}

void ExactOracle::add(std::uint64_t key, std::int64_t weight) {
    std::int64_t& f = counts_[key];
    // F2 gains (f+w)^2 - f^2 = 2fw + w^2.
    f2_ += 2 * f * weight + weight * weight;
    f += weight;
    f1_ += weight;
    ++t_;
}

std::int64_t ExactOracle::frequency(std::uint64_t key) const {
    const auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::uint64_t, std::int64_t>> ExactOracle::topk(std::size_t k) const {
    std::vector<std::pair<std::uint64_t, std::int64_t>> all(counts_.begin(), counts_.end());
    const std::size_t take = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + take, all.end(),
                      [](const auto& a, const auto& b) {
                          if (a.second != b.second) return a.second > b.second;
                          return a.first < b.first;
                      });
    all.resize(take);
    return all;
}

std::vector<std::uint64_t> ExactOracle::heavy_set(int k) const {
    const double threshold = static_cast<double>(t_) / static_cast<double>(k);
    std::vector<std::uint64_t> out;
    for (const auto& [key, f] : counts_)
        if (static_cast<double>(f) >= threshold) out.push_back(key);
    std::sort(out.begin(), out.end());
    return out;
}

std::string fixture_heavy_token(std::size_t i) {
    return "192.0.2." + std::to_string(i + 1);
}

std::string fixture_background_token(std::uint64_t rank) {
    return "10." + std::to_string((rank >> 16) & 255) + "." + std::to_string((rank >> 8) & 255) +
           "." + std::to_string(rank & 255);
}

namespace {

// Arrival schedule as (is_heavy, index) pairs packed in one word.
std::vector<std::uint64_t> fixture_schedule(const FixtureSpec& spec) {
    if (spec.bg_universe >= (1ull << 24))
        throw std::invalid_argument("fixture background universe must fit 24 bits");
    const auto& fractions = fixture_heavy_fractions();
    std::vector<std::uint64_t> schedule;
    schedule.reserve(spec.length);
    std::uint64_t planted = 0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        const auto count = static_cast<std::uint64_t>(
            std::llround(fractions[i] * static_cast<double>(spec.length)));
        planted += count;
        for (std::uint64_t c = 0; c < count; ++c)
            schedule.push_back((1ull << 32) | static_cast<std::uint64_t>(i));
    }
    if (planted > spec.length) throw std::invalid_argument("fixture length too small");

    ZipfSpec bg;
    bg.skew = spec.bg_skew;
    bg.universe = spec.bg_universe;
    bg.length = spec.length - planted;
    bg.seed = derive_seed(spec.seed, 0x62676b67ull);
    ZipfGenerator gen(bg);
    for (std::uint64_t c = 0; c < bg.length; ++c) schedule.push_back(gen.next());

    Xoshiro256pp shuffle_rng(derive_seed(spec.seed, 0x73687566ull));
    for (std::size_t i = schedule.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(
            (static_cast<unsigned __int128>(shuffle_rng.next()) * (i + 1)) >> 64);
        std::swap(schedule[i], schedule[j]);
    }
    return schedule;
}

std::string fixture_token(std::uint64_t slot) {
    return slot >> 32 ? fixture_heavy_token(slot & 0xffffffffull)
                      : fixture_background_token(slot);
}

}  // namespace

std::vector<std::uint64_t> fixture_keys(const FixtureSpec& spec) {
    const auto schedule = fixture_schedule(spec);
    std::vector<std::uint64_t> keys;
    keys.reserve(schedule.size());
    for (const auto slot : schedule) keys.push_back(fnv1a64(fixture_token(slot)));
    return keys;
}

void write_fixture(const FixtureSpec& spec, const std::string& path) {
    const auto schedule = fixture_schedule(spec);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write fixture: " + path);
    for (const auto slot : schedule) out << fixture_token(slot) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_zipf_trace(const ZipfSpec& spec, const std::string& path) {
    ZipfGenerator gen(spec);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace: " + path);
    for (std::uint64_t i = 0; i < spec.length; ++i) out << gen.next() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace codp
