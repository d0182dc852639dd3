#include "codp/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace codp {

namespace {

constexpr std::uint64_t kTagStream = 0x7374726dull;
constexpr std::uint64_t kTagSketch = 0x736b6368ull;
constexpr std::uint64_t kTagTracker = 0x74726b72ull;
constexpr std::uint64_t kTagBaseline = 0x62617365ull;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (const double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

class WallTimer {
  public:
    void start() { begin_ = std::chrono::steady_clock::now(); }
    double stop() {
        const auto end = std::chrono::steady_clock::now();
        return std::chrono::duration<double>(end - begin_).count();
    }

  private:
    std::chrono::steady_clock::time_point begin_;
};

double are_against(const ExactOracle& oracle, int top_k,
                   const std::function<double(std::uint64_t)>& estimate) {
    const auto top = oracle.topk(static_cast<std::size_t>(top_k));
    if (top.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [key, f] : top)
        sum += std::abs(static_cast<double>(f) - estimate(key)) / static_cast<double>(f);
    return sum / static_cast<double>(top.size());
}

}  // namespace

BenchKind parse_bench_kind(const std::string& name) {
    if (name == "cms") return BenchKind::PlainCms;
    if (name == "cs") return BenchKind::PlainCs;
    if (name == "lazy-cms") return BenchKind::LazyCms;
    if (name == "lazy-cs") return BenchKind::LazyCs;
    if (name == "punctual-cms") return BenchKind::PunctualCms;
    if (name == "punctual-cs") return BenchKind::PunctualCs;
    throw std::invalid_argument("unknown sketch kind: " + name);
}

std::string bench_kind_name(BenchKind kind) {
    switch (kind) {
        case BenchKind::PlainCms: return "cms";
        case BenchKind::PlainCs: return "cs";
        case BenchKind::LazyCms: return "lazy-cms";
        case BenchKind::LazyCs: return "lazy-cs";
        case BenchKind::PunctualCms: return "punctual-cms";
        case BenchKind::PunctualCs: return "punctual-cs";
    }
    throw std::logic_error("bad kind");
}

bool kind_is_private(BenchKind kind) {
    return kind != BenchKind::PlainCms && kind != BenchKind::PlainCs;
}

bool kind_is_lazy(BenchKind kind) {
    return kind == BenchKind::LazyCms || kind == BenchKind::LazyCs;
}

SketchKind kind_estimator(BenchKind kind) {
    switch (kind) {
        case BenchKind::PlainCms:
        case BenchKind::LazyCms:
        case BenchKind::PunctualCms: return SketchKind::CountMin;
        default: return SketchKind::CountSketch;
    }
}

std::uint64_t width_for_budget(BenchKind kind, std::uint64_t budget_bytes, int depth,
                               std::uint64_t capacity, std::uint64_t word_bytes) {
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    if (word_bytes < 1) throw std::invalid_argument("word_bytes must be >= 1");
    const std::uint64_t words = budget_bytes / word_bytes;
    const auto d = static_cast<std::uint64_t>(depth);
    std::uint64_t w = 0;
    if (!kind_is_private(kind)) {
        w = words / d;
    } else if (!kind_is_lazy(kind)) {
        w = words / (d * counter_words(capacity));
    } else {
        // Per-column cost steps down as width pushes counter capacity past
        // powers of two, so scan down from the cheapest-column bound.
        for (std::uint64_t cand = words / (d * 3); cand >= 1; --cand) {
            if (lazy_sketch_words(depth, cand, capacity) <= words) {
                w = cand;
                break;
            }
        }
    }
    if (w < 1) throw std::invalid_argument("memory budget too small for width 1");
    return w;
}

namespace {

template <typename Sketch>
FreqTrial run_freq_trial(Sketch& sk, const std::vector<std::uint64_t>& keys,
                         const ExactOracle& oracle, int top_k) {
    WallTimer timer;
    timer.start();
    for (const auto key : keys) sk.update(key);
    FreqTrial trial;
    trial.wall_s = timer.stop();
    trial.updates_per_s =
        trial.wall_s > 0.0 ? static_cast<double>(keys.size()) / trial.wall_s : 0.0;
    trial.are = are_against(oracle, top_k, [&](std::uint64_t key) {
        return static_cast<double>(sk.query(key));
    });
    return trial;
}

}  // namespace

FreqBenchReport run_frequency_bench(const RunConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if ((cfg.width == 0) == (cfg.budget_bytes == 0))
        throw std::invalid_argument("give exactly one of width and budget");
    if (!cfg.noise_off && kind_is_private(cfg.kind)) cfg.privacy.validate();

    FreqBenchReport report;
    report.cfg = cfg;
    report.width = cfg.width != 0
                       ? cfg.width
                       : width_for_budget(cfg.kind, cfg.budget_bytes, cfg.depth, cfg.length);

    std::vector<std::uint64_t> trace_keys;
    if (!cfg.trace.empty()) trace_keys = trace_stream(cfg.trace, cfg.length);

    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t stream_seed = derive_seed(cfg.seed, kTagStream, trial);
        const std::uint64_t sketch_seed = derive_seed(cfg.seed, kTagSketch, trial);
        std::vector<std::uint64_t> synthetic;
        if (cfg.trace.empty())
            synthetic = zipf_stream({cfg.skew, cfg.universe, cfg.length, stream_seed});
        const std::vector<std::uint64_t>& arrivals = cfg.trace.empty() ? synthetic : trace_keys;

        ExactOracle oracle;
        for (const auto key : arrivals) oracle.add(key);

        const std::uint64_t capacity = arrivals.size();
        FreqTrial t;
        switch (cfg.kind) {
            case BenchKind::PlainCms:
            case BenchKind::PlainCs: {
                PlainSketch sk(kind_estimator(cfg.kind), cfg.depth, report.width, sketch_seed);
                t = run_freq_trial(sk, arrivals, oracle, cfg.top_k);
                report.memory_words = sk.memory_words();
                break;
            }
            case BenchKind::PunctualCms:
            case BenchKind::PunctualCs: {
                if (cfg.noise_off) {
                    PunctualSketch sk(kind_estimator(cfg.kind), cfg.depth, report.width, capacity,
                                      NoiseScale{0.0}, sketch_seed);
                    t = run_freq_trial(sk, arrivals, oracle, cfg.top_k);
                    report.memory_words = sk.memory_words();
                } else {
                    PunctualSketch sk(kind_estimator(cfg.kind), cfg.depth, report.width, capacity,
                                      cfg.privacy, sketch_seed);
                    t = run_freq_trial(sk, arrivals, oracle, cfg.top_k);
                    report.memory_words = sk.memory_words();
                    report.sigma = sk.sigma();
                }
                break;
            }
            case BenchKind::LazyCms:
            case BenchKind::LazyCs: {
                if (cfg.noise_off) {
                    LazySketch sk(kind_estimator(cfg.kind), cfg.depth, report.width, capacity,
                                  NoiseScale{0.0}, sketch_seed);
                    t = run_freq_trial(sk, arrivals, oracle, cfg.top_k);
                    report.memory_words = sk.memory_words();
                } else {
                    LazySketch sk(kind_estimator(cfg.kind), cfg.depth, report.width, capacity,
                                  cfg.privacy, sketch_seed);
                    t = run_freq_trial(sk, arrivals, oracle, cfg.top_k);
                    report.memory_words = sk.memory_words();
                    report.sigma = sk.sigma();
                }
                break;
            }
        }
        report.trials.push_back(t);
    }

    report.memory_bytes = report.memory_words * kWordBytes;
    std::vector<double> ares, walls, ups;
    for (const auto& t : report.trials) {
        ares.push_back(t.are);
        walls.push_back(t.wall_s);
        ups.push_back(t.updates_per_s);
    }
    report.are_mean = mean_of(ares);
    report.are_std = std_of(ares);
    report.wall_mean = mean_of(walls);
    report.updates_per_s_mean = mean_of(ups);
    return report;
}

namespace {

struct SetMetrics {
    double precision = 1.0;
    double recall = 1.0;
};

SetMetrics score_sets(const std::vector<std::uint64_t>& truth,
                      const std::vector<std::uint64_t>& reported) {
    std::unordered_set<std::uint64_t> truth_set(truth.begin(), truth.end());
    std::size_t hits = 0;
    for (const auto key : reported) hits += truth_set.count(key);
    SetMetrics m;
    m.precision = reported.empty() ? 1.0
                                   : static_cast<double>(hits) / static_cast<double>(reported.size());
    m.recall = truth.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
    return m;
}

}  // namespace

HhBenchReport run_hh_bench(const HhRunConfig& cfg, const RefreshHook& on_refresh) {
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (!cfg.noise_off) cfg.privacy.validate();

    HhBenchReport report;
    report.cfg = cfg;

    std::vector<std::uint64_t> trace_keys;
    if (!cfg.trace.empty()) trace_keys = trace_stream(cfg.trace, cfg.length);

    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(cfg.seed, kTagStream, trial);
        std::vector<std::uint64_t> fixture;
        if (cfg.trace.empty()) fixture = fixture_keys({cfg.length, trial_seed});
        const std::vector<std::uint64_t>& arrivals = cfg.trace.empty() ? fixture : trace_keys;

        ExactOracle oracle;
        for (const auto key : arrivals) oracle.add(key);
        const auto truth = oracle.heavy_set(cfg.k);

        HhConfig hh_cfg;
        hh_cfg.k = cfg.k;
        hh_cfg.ktilde = cfg.ktilde;
        hh_cfg.capacity = arrivals.size();
        hh_cfg.privacy = cfg.privacy;
        hh_cfg.beta = cfg.beta;
        hh_cfg.seed = derive_seed(cfg.seed, kTagTracker, trial);

        HhTrial t;
        WallTimer timer;
        std::vector<std::uint64_t> reported_keys;
        {
            auto tracker = cfg.noise_off ? LazyHeavyHitters(hh_cfg, NoiseScale{0.0})
                                         : LazyHeavyHitters(hh_cfg);
            timer.start();
            if (on_refresh) {
                for (const auto key : arrivals) {
                    const auto& out = tracker.update(key);
                    if (tracker.t_now() % cfg.ktilde == 0) on_refresh(tracker.t_now(), out);
                }
            } else {
                tracker.update_all(arrivals);
            }
            t.wall_s = timer.stop();
            t.updates_per_s =
                t.wall_s > 0.0 ? static_cast<double>(arrivals.size()) / t.wall_s : 0.0;

            const auto& final_report = tracker.report();
            t.reported = final_report.size();
            double are_sum = 0.0;
            for (const auto& item : final_report) {
                reported_keys.push_back(item.key);
                const auto f = static_cast<double>(oracle.frequency(item.key));
                if (f > 0.0) are_sum += std::abs(f - item.estimate) / f;
            }
            t.are = final_report.empty() ? 0.0 : are_sum / static_cast<double>(final_report.size());
            report.depth = tracker.depth();
            report.gamma = tracker.gamma();
            report.sigma = tracker.sketch().sigma();
            report.memory_words = tracker.sketch().memory_words();
        }

        const auto metrics = score_sets(truth, reported_keys);
        t.precision = metrics.precision;
        t.recall = metrics.recall;
        t.true_heavies = truth.size();

        // Equal-memory non-private baseline: plain count-min plus heap.
        report.baseline_width = std::max<std::uint64_t>(1, report.memory_words / 3);
        HeapHeavyHitters base(cfg.k, 3, report.baseline_width,
                              derive_seed(cfg.seed, kTagBaseline, trial));
        for (const auto key : arrivals) base.update(key);
        std::vector<std::uint64_t> base_keys;
        for (const auto& [key, est] : base.report(arrivals.size())) base_keys.push_back(key);
        const auto base_metrics = score_sets(truth, base_keys);
        t.base_precision = base_metrics.precision;
        t.base_recall = base_metrics.recall;
        t.base_reported = base_keys.size();

        report.trials.push_back(t);
    }

    report.memory_bytes = report.memory_words * kWordBytes;
    std::vector<double> ps, rs;
    for (const auto& t : report.trials) {
        ps.push_back(t.precision);
        rs.push_back(t.recall);
    }
    report.precision_mean = mean_of(ps);
    report.recall_mean = mean_of(rs);
    return report;
}

namespace {

const char* kFreqHeader =
    "schema_version,row,kind,length,depth,width,budget_bytes,eps,delta,sigma,skew,universe,seed,"
    "trial,trials,noise_off,memory_words,memory_bytes,are_top15,are_std,wall_time_total_s,"
    "updates_per_s";

std::string freq_row(const FreqBenchReport& r, int trial_idx) {
    const auto& cfg = r.cfg;
    const bool summary = trial_idx < 0;
    const FreqTrial agg{r.are_mean, r.wall_mean, r.updates_per_s_mean};
    const FreqTrial& t = summary ? agg : r.trials[static_cast<std::size_t>(trial_idx)];
    std::string row = "1,";
    row += summary ? "summary" : "trial";
    row += "," + bench_kind_name(cfg.kind);
    row += "," + std::to_string(cfg.length);
    row += "," + std::to_string(cfg.depth);
    row += "," + std::to_string(r.width);
    row += "," + std::to_string(cfg.budget_bytes);
    row += "," + fmt_double(cfg.privacy.epsilon);
    row += "," + fmt_double(cfg.privacy.delta);
    row += "," + fmt_double(r.sigma);
    row += "," + fmt_double(cfg.skew);
    row += "," + std::to_string(cfg.universe);
    row += "," + std::to_string(cfg.seed);
    row += "," + (summary ? std::string("all") : std::to_string(trial_idx));
    row += "," + std::to_string(cfg.trials);
    row += "," + std::string(cfg.noise_off ? "1" : "0");
    row += "," + std::to_string(r.memory_words);
    row += "," + std::to_string(r.memory_bytes);
    row += "," + fmt_double(t.are);
    row += "," + (summary ? fmt_double(r.are_std) : std::string(""));
    row += "," + fmt_double(t.wall_s);
    row += "," + fmt_double(t.updates_per_s);
    return row;
}

}  // namespace

std::string freq_report_csv(const FreqBenchReport& report) {
    std::string out = kFreqHeader;
    out += '\n';
    for (int i = 0; i < static_cast<int>(report.trials.size()); ++i) {
        out += freq_row(report, i);
        out += '\n';
    }
    out += freq_row(report, -1);
    out += '\n';
    return out;
}

std::string freq_report_json(const FreqBenchReport& report) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = bench_kind_name(report.cfg.kind);
    j["length"] = report.cfg.length;
    j["depth"] = report.cfg.depth;
    j["width"] = report.width;
    j["budget_bytes"] = report.cfg.budget_bytes;
    j["eps"] = report.cfg.privacy.epsilon;
    j["delta"] = report.cfg.privacy.delta;
    j["sigma"] = report.sigma;
    j["skew"] = report.cfg.skew;
    j["universe"] = report.cfg.universe;
    j["seed"] = report.cfg.seed;
    j["trials"] = report.cfg.trials;
    j["noise_off"] = report.cfg.noise_off;
    j["memory_words"] = report.memory_words;
    j["memory_bytes"] = report.memory_bytes;
    j["are_top15_mean"] = report.are_mean;
    j["are_top15_std"] = report.are_std;
    auto& arr = j["trials_detail"] = nlohmann::json::array();
    for (const auto& t : report.trials) {
        arr.push_back({{"are_top15", t.are},
                       {"wall_time_total_s", t.wall_s},
                       {"updates_per_s", t.updates_per_s}});
    }
    return j.dump(2) + "\n";
}

namespace {

const char* kHhHeader =
    "schema_version,row,stream,length,k,ktilde,depth,eps,delta,beta,gamma,sigma,seed,trial,trials,"
    "noise_off,memory_words,memory_bytes,baseline_width,precision,recall,are_reported,reported,"
    "true_heavies,base_precision,base_recall,base_reported,wall_time_total_s,updates_per_s";

std::string hh_row(const HhBenchReport& r, int trial_idx) {
    const auto& cfg = r.cfg;
    const bool summary = trial_idx < 0;
    HhTrial agg;
    if (summary) {
        agg.precision = r.precision_mean;
        agg.recall = r.recall_mean;
        std::vector<double> ares, walls, ups;
        double reported = 0.0, base_p = 0.0, base_r = 0.0, base_n = 0.0, truth = 0.0;
        for (const auto& t : r.trials) {
            ares.push_back(t.are);
            walls.push_back(t.wall_s);
            ups.push_back(t.updates_per_s);
            reported += static_cast<double>(t.reported);
            base_p += t.base_precision;
            base_r += t.base_recall;
            base_n += static_cast<double>(t.base_reported);
            truth += static_cast<double>(t.true_heavies);
        }
        const auto n = static_cast<double>(r.trials.size());
        agg.are = mean_of(ares);
        agg.wall_s = mean_of(walls);
        agg.updates_per_s = mean_of(ups);
        agg.reported = static_cast<std::uint64_t>(reported / n);
        agg.true_heavies = static_cast<std::uint64_t>(truth / n);
        agg.base_precision = base_p / n;
        agg.base_recall = base_r / n;
        agg.base_reported = static_cast<std::uint64_t>(base_n / n);
    }
    const HhTrial& t = summary ? agg : r.trials[static_cast<std::size_t>(trial_idx)];
    std::string row = "1,";
    row += summary ? "summary" : "trial";
    row += "," + std::string(cfg.trace.empty() ? "fixture" : "trace");
    row += "," + std::to_string(cfg.length);
    row += "," + std::to_string(cfg.k);
    row += "," + std::to_string(cfg.ktilde);
    row += "," + std::to_string(r.depth);
    row += "," + fmt_double(cfg.privacy.epsilon);
    row += "," + fmt_double(cfg.privacy.delta);
    row += "," + fmt_double(cfg.beta);
    row += "," + fmt_double(r.gamma);
    row += "," + fmt_double(r.sigma);
    row += "," + std::to_string(cfg.seed);
    row += "," + (summary ? std::string("all") : std::to_string(trial_idx));
    row += "," + std::to_string(cfg.trials);
    row += "," + std::string(cfg.noise_off ? "1" : "0");
    row += "," + std::to_string(r.memory_words);
    row += "," + std::to_string(r.memory_bytes);
    row += "," + std::to_string(r.baseline_width);
    row += "," + fmt_double(t.precision);
    row += "," + fmt_double(t.recall);
    row += "," + fmt_double(t.are);
    row += "," + std::to_string(t.reported);
    row += "," + std::to_string(t.true_heavies);
    row += "," + fmt_double(t.base_precision);
    row += "," + fmt_double(t.base_recall);
    row += "," + std::to_string(t.base_reported);
    row += "," + fmt_double(t.wall_s);
    row += "," + fmt_double(t.updates_per_s);
    return row;
}

}  // namespace

std::string hh_report_csv(const HhBenchReport& report) {
    std::string out = kHhHeader;
    out += '\n';
    for (int i = 0; i < static_cast<int>(report.trials.size()); ++i) {
        out += hh_row(report, i);
        out += '\n';
    }
    out += hh_row(report, -1);
    out += '\n';
    return out;
}

std::string hh_report_json(const HhBenchReport& report) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["stream"] = report.cfg.trace.empty() ? "fixture" : "trace";
    j["length"] = report.cfg.length;
    j["k"] = report.cfg.k;
    j["ktilde"] = report.cfg.ktilde;
    j["depth"] = report.depth;
    j["eps"] = report.cfg.privacy.epsilon;
    j["delta"] = report.cfg.privacy.delta;
    j["beta"] = report.cfg.beta;
    j["gamma"] = report.gamma;
    j["sigma"] = report.sigma;
    j["seed"] = report.cfg.seed;
    j["trials"] = report.cfg.trials;
    j["noise_off"] = report.cfg.noise_off;
    j["memory_words"] = report.memory_words;
    j["memory_bytes"] = report.memory_bytes;
    j["baseline_width"] = report.baseline_width;
    j["precision_mean"] = report.precision_mean;
    j["recall_mean"] = report.recall_mean;
    auto& arr = j["trials_detail"] = nlohmann::json::array();
    for (const auto& t : report.trials) {
        arr.push_back({{"precision", t.precision},
                       {"recall", t.recall},
                       {"are_reported", t.are},
                       {"reported", t.reported},
                       {"true_heavies", t.true_heavies},
                       {"base_precision", t.base_precision},
                       {"base_recall", t.base_recall},
                       {"base_reported", t.base_reported},
                       {"wall_time_total_s", t.wall_s},
                       {"updates_per_s", t.updates_per_s}});
    }
    return j.dump(2) + "\n";
}

std::string refresh_line_json(std::uint64_t t, const std::vector<HhItem>& items) {
    nlohmann::json j;
    j["t"] = t;
    auto& arr = j["items"] = nlohmann::json::array();
    for (const auto& item : items)
        arr.push_back({{"key", item.key}, {"estimate", item.estimate}});
    return j.dump();
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace codp
