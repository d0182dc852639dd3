#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "codp/bench.hpp"
#include "codp/snapshot.hpp"
#include "codp/streamgen.hpp"

namespace {

// CODP_SEED beats --seed so batch drivers can re-seed without editing
// command lines.
std::uint64_t effective_seed(std::uint64_t flag_seed) {
    if (const char* env = std::getenv("CODP_SEED")) return std::strtoull(env, nullptr, 10);
    return flag_seed;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    codp::write_text(text, out_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differentially private streaming sketches under continual observation"};
    app.require_subcommand(1);

    // gen-zipf
    codp::ZipfSpec zipf;
    std::string zipf_out;
    auto* gen_zipf = app.add_subcommand("gen-zipf", "Write a Zipf token trace");
    gen_zipf->add_option("--skew", zipf.skew, "Zipf exponent")->check(CLI::PositiveNumber);
    gen_zipf->add_option("--universe", zipf.universe, "Number of distinct ranks");
    gen_zipf->add_option("--length", zipf.length, "Arrivals to write");
    gen_zipf->add_option("--seed", zipf.seed, "Generator seed");
    gen_zipf->add_option("--out", zipf_out, "Output path")->required();

    // gen-fixture
    codp::FixtureSpec fixture;
    std::string fixture_out;
    auto* gen_fixture = app.add_subcommand("gen-fixture", "Write the packet-trace style fixture");
    gen_fixture->add_option("--length", fixture.length, "Arrivals to write");
    gen_fixture->add_option("--seed", fixture.seed, "Generator seed");
    gen_fixture->add_option("--bg-universe", fixture.bg_universe, "Background universe size");
    gen_fixture->add_option("--bg-skew", fixture.bg_skew, "Background Zipf exponent");
    gen_fixture->add_option("--out", fixture_out, "Output path")->required();

    // freq-bench
    codp::RunConfig freq;
    std::string freq_kind = "lazy-cms";
    std::uint64_t freq_budget_kb = 0;
    std::string freq_out, freq_format = "csv", freq_snapshot_out;
    auto* freq_bench = app.add_subcommand("freq-bench", "Frequency estimation benchmark");
    freq_bench->add_option("--kind", freq_kind,
                           "cms|cs|lazy-cms|lazy-cs|punctual-cms|punctual-cs");
    freq_bench->add_option("--eps", freq.privacy.epsilon, "Privacy epsilon");
    freq_bench->add_option("--delta", freq.privacy.delta, "Privacy delta");
    freq_bench->add_option("--depth", freq.depth, "Sketch depth (rows)");
    auto* width_opt = freq_bench->add_option("--width", freq.width, "Sketch width (columns)");
    auto* budget_opt =
        freq_bench->add_option("--budget-kb", freq_budget_kb, "Memory budget in KiB");
    width_opt->excludes(budget_opt);
    freq_bench->add_option("--skew", freq.skew, "Zipf exponent for the synthetic stream");
    freq_bench->add_option("--universe", freq.universe, "Synthetic universe size");
    freq_bench->add_option("--length", freq.length, "Arrivals per trial");
    freq_bench->add_option("--seed", freq.seed, "Master seed");
    freq_bench->add_option("--trials", freq.trials, "Independent trials");
    freq_bench->add_option("--trace", freq.trace, "Token file replacing the synthetic stream");
    freq_bench->add_flag("--noise-off", freq.noise_off, "Run private sketches with zero noise");
    freq_bench->add_option("--out", freq_out, "Report path (default stdout)");
    freq_bench->add_option("--format", freq_format, "csv|json");
    freq_bench->add_option("--snapshot-out", freq_snapshot_out,
                           "Also write the final released state as JSON (private kinds)");

    // hh-bench
    codp::HhRunConfig hh;
    std::string hh_out, hh_format = "csv", hh_reports_out;
    auto* hh_bench = app.add_subcommand("hh-bench", "Continual heavy hitters benchmark");
    hh_bench->add_option("--eps", hh.privacy.epsilon, "Privacy epsilon");
    hh_bench->add_option("--delta", hh.privacy.delta, "Privacy delta");
    hh_bench->add_option("--beta", hh.beta, "Failure probability for the threshold bound");
    hh_bench->add_option("--k", hh.k, "Heavy hitter threshold parameter (f >= T/k)");
    hh_bench->add_option("--ktilde", hh.ktilde, "Tracker width / refresh period");
    hh_bench->add_option("--length", hh.length, "Arrivals per trial");
    hh_bench->add_option("--seed", hh.seed, "Master seed");
    hh_bench->add_option("--trials", hh.trials, "Independent trials");
    hh_bench->add_option("--trace", hh.trace, "Token file replacing the built-in fixture");
    hh_bench->add_flag("--noise-off", hh.noise_off, "Run the tracker with zero noise");
    hh_bench->add_option("--out", hh_out, "Report path (default stdout)");
    hh_bench->add_option("--format", hh_format, "csv|json");
    hh_bench->add_option("--emit-reports", hh_reports_out,
                         "Write one JSON line per refresh to this path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_zipf->parsed()) {
            zipf.seed = effective_seed(zipf.seed);
            codp::write_zipf_trace(zipf, zipf_out);
            return 0;
        }
        if (gen_fixture->parsed()) {
            fixture.seed = effective_seed(fixture.seed);
            codp::write_fixture(fixture, fixture_out);
            return 0;
        }
        if (freq_bench->parsed()) {
            freq.kind = codp::parse_bench_kind(freq_kind);
            freq.seed = effective_seed(freq.seed);
            if (freq_budget_kb != 0) freq.budget_bytes = freq_budget_kb * 1024;
            if (freq.width == 0 && freq.budget_bytes == 0)
                throw std::invalid_argument("give --width or --budget-kb");
            const auto report = codp::run_frequency_bench(freq);
            emit(freq_format == "json" ? codp::freq_report_json(report)
                                       : codp::freq_report_csv(report),
                 freq_out);
            if (!freq_snapshot_out.empty()) {
                if (!codp::kind_is_private(freq.kind))
                    throw std::invalid_argument("--snapshot-out needs a private kind");
                codp::RunConfig one = freq;
                one.trials = 1;
                const auto seed = codp::derive_seed(one.seed, 0x736e6170ull);
                std::vector<std::uint64_t> keys =
                    one.trace.empty()
                        ? codp::zipf_stream({one.skew, one.universe, one.length, seed})
                        : codp::trace_stream(one.trace, one.length);
                const codp::NoiseScale off{0.0};
                const codp::SketchKind est = codp::kind_estimator(one.kind);
                if (codp::kind_is_lazy(one.kind)) {
                    codp::LazySketch sk = one.noise_off
                        ? codp::LazySketch(est, one.depth, report.width, keys.size(), off, seed)
                        : codp::LazySketch(est, one.depth, report.width, keys.size(), one.privacy, seed);
                    for (const auto k : keys) sk.update(k);
                    codp::write_text(codp::snapshot_to_json(codp::take_snapshot(sk)) + "\n",
                                     freq_snapshot_out);
                } else {
                    codp::PunctualSketch sk = one.noise_off
                        ? codp::PunctualSketch(est, one.depth, report.width, keys.size(), off, seed)
                        : codp::PunctualSketch(est, one.depth, report.width, keys.size(), one.privacy, seed);
                    for (const auto k : keys) sk.update(k);
                    codp::write_text(codp::snapshot_to_json(codp::take_snapshot(sk)) + "\n",
                                     freq_snapshot_out);
                }
            }
            return 0;
        }
        if (hh_bench->parsed()) {
            hh.seed = effective_seed(hh.seed);
            std::string lines;
            codp::RefreshHook hook;
            if (!hh_reports_out.empty())
                hook = [&lines](std::uint64_t t, const std::vector<codp::HhItem>& items) {
                    lines += codp::refresh_line_json(t, items);
                    lines += '\n';
                };
            const auto report = codp::run_hh_bench(hh, hook);
            if (!hh_reports_out.empty()) codp::write_text(lines, hh_reports_out);
            emit(hh_format == "json" ? codp::hh_report_json(report) : codp::hh_report_csv(report),
                 hh_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
