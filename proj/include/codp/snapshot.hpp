#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codp/private_sketch.hpp"

namespace codp {

// Released state of a private sketch: the noisy per-cell sums, and only
// those. The lazy sketch's exact buffer is deliberately absent; nothing in
// a snapshot depends on unflushed arrivals.
struct SketchSnapshot {
    std::string kind;  // "punctual-cms", "lazy-cs", ...
    int depth = 0;
    std::uint64_t width = 0;
    std::uint64_t t = 0;
    std::vector<double> release;  // row-major depth x width

    double cell(int i, std::uint64_t j) const {
        return release[static_cast<std::size_t>(i) * width + j];
    }
};

SketchSnapshot take_snapshot(const PunctualSketch& sk);
SketchSnapshot take_snapshot(const LazySketch& sk);

std::string snapshot_to_json(const SketchSnapshot& snap);
SketchSnapshot snapshot_from_json(const std::string& text);

void write_snapshot_binary(const SketchSnapshot& snap, const std::string& path);
SketchSnapshot read_snapshot_binary(const std::string& path);

// Invokes on_release(t, sketch) after each arrival, for continual-release
// consumers that want the per-step noisy state without T stored copies.
template <typename Sketch, typename Fn>
void run_stream_with_releases(Sketch& sk, const std::vector<std::uint64_t>& keys, Fn&& on_release) {
    for (const auto key : keys) {
        sk.update(key);
        on_release(sk.t_now(), sk);
    }
}

}  // namespace codp
