#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "codp/heavy_hitters.hpp"
#include "codp/private_sketch.hpp"
#include "codp/streamgen.hpp"

namespace codp {

enum class BenchKind { PlainCms, PlainCs, LazyCms, LazyCs, PunctualCms, PunctualCs };

BenchKind parse_bench_kind(const std::string& name);
std::string bench_kind_name(BenchKind kind);
bool kind_is_private(BenchKind kind);
bool kind_is_lazy(BenchKind kind);
SketchKind kind_estimator(BenchKind kind);

// Largest width whose accounted footprint fits the byte budget; see the
// word model in private_sketch.hpp. Throws if even width 1 does not fit.
std::uint64_t width_for_budget(BenchKind kind, std::uint64_t budget_bytes, int depth,
                               std::uint64_t capacity, std::uint64_t word_bytes = kWordBytes);

struct RunConfig {
    BenchKind kind = BenchKind::LazyCms;
    std::uint64_t length = 1ull << 20;
    int depth = 3;
    std::uint64_t width = 0;         // 0 = derive from budget_bytes
    std::uint64_t budget_bytes = 0;  // 0 = width given explicitly
    PrivacyParams privacy{0.5, 1e-3};
    double skew = 1.3;
    std::uint64_t universe = 1'000'000;
    std::uint64_t seed = 1;
    int trials = 5;
    int top_k = 15;
    bool noise_off = false;
    std::string trace;  // non-empty: read arrivals from this token file
};

struct FreqTrial {
    double are = 0.0;
    double wall_s = 0.0;
    double updates_per_s = 0.0;
};

struct FreqBenchReport {
    RunConfig cfg;
    std::uint64_t width = 0;
    std::uint64_t memory_words = 0;
    std::uint64_t memory_bytes = 0;
    double sigma = 0.0;
    std::vector<FreqTrial> trials;
    double are_mean = 0.0;
    double are_std = 0.0;
    double wall_mean = 0.0;
    double updates_per_s_mean = 0.0;
};

// Streams trials through the configured sketch, timing the update loop
// only, and scores mean absolute relative error on the oracle's top keys.
FreqBenchReport run_frequency_bench(const RunConfig& cfg);

struct HhRunConfig {
    int k = 32;
    std::uint64_t ktilde = 128;
    std::uint64_t length = 1ull << 22;
    PrivacyParams privacy{0.5, 1e-3};
    double beta = 5e-4;
    std::uint64_t seed = 1;
    int trials = 1;
    bool noise_off = false;
    std::string trace;  // non-empty: token file; empty: built-in fixture
};

struct HhTrial {
    double precision = 1.0;
    double recall = 1.0;
    double are = 0.0;
    std::uint64_t reported = 0;
    std::uint64_t true_heavies = 0;
    double base_precision = 1.0;
    double base_recall = 1.0;
    std::uint64_t base_reported = 0;
    double wall_s = 0.0;
    double updates_per_s = 0.0;
};

struct HhBenchReport {
    HhRunConfig cfg;
    int depth = 0;
    double gamma = 0.0;
    double sigma = 0.0;
    std::uint64_t memory_words = 0;
    std::uint64_t memory_bytes = 0;
    std::uint64_t baseline_width = 0;
    std::vector<HhTrial> trials;
    double precision_mean = 1.0;
    double recall_mean = 1.0;
};

using RefreshHook = std::function<void(std::uint64_t t, const std::vector<HhItem>&)>;

// Runs the tracker and the equal-memory non-private heap baseline over the
// same arrivals and scores both against the exact f >= T/k set.
HhBenchReport run_hh_bench(const HhRunConfig& cfg, const RefreshHook& on_refresh = nullptr);

std::string freq_report_csv(const FreqBenchReport& report);
std::string freq_report_json(const FreqBenchReport& report);
std::string hh_report_csv(const HhBenchReport& report);
std::string hh_report_json(const HhBenchReport& report);

// One JSON object per refresh: {"t":..., "items":[{"key":...,"estimate":...}]}.
std::string refresh_line_json(std::uint64_t t, const std::vector<HhItem>& items);

void write_text(const std::string& text, const std::string& path);

}  // namespace codp
