#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "codp/binary_mechanism.hpp"
#include "codp/hashing.hpp"
#include "codp/plain_sketch.hpp"

namespace codp {

constexpr std::uint64_t kWordBytes = 8;

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

// Memory accounting, in 8-byte words: one word per plain counter cell, per
// tree-level slot of a continual counter, and per lazy buffer cell. Hash
// parameters and generator state are not charged; reported bytes are
// words * 8. This is the budget model width_for_budget solves against.
inline std::uint64_t plain_sketch_words(int depth, std::uint64_t width) {
    return static_cast<std::uint64_t>(depth) * width;
}
inline std::uint64_t counter_words(std::uint64_t capacity) {
    return static_cast<std::uint64_t>(tree_levels(capacity));
}
inline std::uint64_t punctual_sketch_words(int depth, std::uint64_t width, std::uint64_t capacity) {
    return static_cast<std::uint64_t>(depth) * width * counter_words(capacity);
}
inline std::uint64_t lazy_sketch_words(int depth, std::uint64_t width, std::uint64_t capacity) {
    return static_cast<std::uint64_t>(depth) * width *
           (counter_words(ceil_div(capacity, width)) + 1);
}

namespace detail {

inline std::vector<BinaryMechanismCounter> make_grid(int depth, std::uint64_t width,
                                                     std::uint64_t counter_capacity,
                                                     NoiseScale noise, std::uint64_t seed) {
    std::vector<BinaryMechanismCounter> grid;
    grid.reserve(static_cast<std::size_t>(depth) * width);
    for (int i = 0; i < depth; ++i)
        for (std::uint64_t j = 0; j < width; ++j)
            grid.emplace_back(counter_capacity, noise,
                              derive_seed(seed, 0x63656c6cull, static_cast<std::uint64_t>(i), j));
    return grid;
}

inline double aggregate_readings(SketchKind kind, std::array<double, kMaxDepth>& readings, int d) {
    if (kind == SketchKind::CountMin) return *std::min_element(readings.begin(), readings.begin() + d);
    const int idx = (d - 1) / 2;
    std::nth_element(readings.begin(), readings.begin() + idx, readings.begin() + d);
    return readings[idx];
}

}  // namespace detail

// Private sketch that feeds every counter at every arrival: the hashed
// cell gets +1 (count-min) or the key's sign (count sketch) and the other
// w-1 cells of each row get an explicit zero, so each of the d*w counters
// advances once per arrival. Noise is calibrated for capacity T with
// sensitivity 2d (one arrival touches d cells, each bounded by 1, under
// streams differing in one arrival's key).
class PunctualSketch {
  public:
    PunctualSketch(SketchKind kind, int depth, std::uint64_t width, std::uint64_t capacity,
                   NoiseScale noise, std::uint64_t seed)
        : kind_(kind), width_(width), capacity_(capacity),
          rows_(make_rows(seed, depth, width)),
          grid_(detail::make_grid(depth, width, capacity, noise, seed)) {}

    PunctualSketch(SketchKind kind, int depth, std::uint64_t width, std::uint64_t capacity,
                   const PrivacyParams& p, std::uint64_t seed)
        : PunctualSketch(kind, depth, width, capacity,
                         NoiseScale{calibrate_sigma(capacity, p, 2 * depth)}, seed) {}

    void update(std::uint64_t key) {
        const std::uint64_t t = t_ + 1;
        if (t > capacity_) throw std::out_of_range("sketch capacity exceeded");
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto& row = rows_[i];
            const std::uint64_t hit = row.index(key);
            const std::int64_t inc = kind_ == SketchKind::CountMin ? 1 : row.sign(key);
            BinaryMechanismCounter* cells = grid_.data() + i * width_;
            for (std::uint64_t j = 0; j < width_; ++j)
                cells[j].update(j == hit ? inc : 0, t);
        }
        t_ = t;
        counter_updates_ += rows_.size() * width_;
    }

    double query(std::uint64_t key) const {
        std::array<double, kMaxDepth> readings{};
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto& row = rows_[i];
            const double v = grid_[i * width_ + row.index(key)].query();
            readings[i] = kind_ == SketchKind::CountMin ? v : row.sign(key) * v;
        }
        return detail::aggregate_readings(kind_, readings, depth());
    }

    SketchKind kind() const { return kind_; }
    int depth() const { return static_cast<int>(rows_.size()); }
    std::uint64_t width() const { return width_; }
    std::uint64_t capacity() const { return capacity_; }
    std::uint64_t t_now() const { return t_; }
    const std::vector<HashRow>& rows() const { return rows_; }
    double sigma() const { return grid_.front().sigma(); }
    std::uint64_t memory_words() const { return punctual_sketch_words(depth(), width_, capacity_); }
    std::uint64_t counter_updates() const { return counter_updates_; }

    // Released (noisy) view of cell (i, j); reading it does not mutate.
    double cell_release(int i, std::uint64_t j) const {
        return grid_[static_cast<std::size_t>(i) * width_ + j].query();
    }

    std::uint64_t nodes_created() const {
        std::uint64_t n = 0;
        for (const auto& c : grid_) n += c.nodes_created();
        return n;
    }

  private:
    SketchKind kind_;
    std::uint64_t width_;
    std::uint64_t capacity_;
    std::uint64_t t_ = 0;
    std::vector<HashRow> rows_;
    std::vector<BinaryMechanismCounter> grid_;
    std::uint64_t counter_updates_ = 0;
};

// Private sketch that buffers exact counts and pushes one column per
// arrival. Arrival t adds to the exact buffer at the hashed cell, then
// column (t-1) mod w flushes its buffered values into that column's
// counters at interval time floor((t-1)/w)+1 and resets. Counters span
// ceil(T/w) intervals, so per-node noise is much smaller than punctual's,
// and each arrival costs d counter pushes instead of d*w. Queries read
// counters only; the exact buffer is never released.
class LazySketch {
  public:
    LazySketch(SketchKind kind, int depth, std::uint64_t width, std::uint64_t capacity,
               NoiseScale noise, std::uint64_t seed)
        : kind_(kind), width_(width), capacity_(capacity),
          rows_(make_rows(seed, depth, width)),
          grid_(detail::make_grid(depth, width, ceil_div(capacity, width), noise, seed)),
          buffer_(static_cast<std::size_t>(depth) * width, 0) {}

    LazySketch(SketchKind kind, int depth, std::uint64_t width, std::uint64_t capacity,
               const PrivacyParams& p, std::uint64_t seed)
        : LazySketch(kind, depth, width, capacity,
                     NoiseScale{calibrate_sigma(ceil_div(capacity, width), p, 2 * depth)}, seed) {}

    void update(std::uint64_t key) {
        const std::uint64_t t = t_ + 1;
        if (t > capacity_) throw std::out_of_range("sketch capacity exceeded");
        const std::uint64_t pos = (t - 1) % width_;
        const std::uint64_t interval = (t - 1) / width_ + 1;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto& row = rows_[i];
            const std::int64_t inc = kind_ == SketchKind::CountMin ? 1 : row.sign(key);
            std::int64_t* brow = buffer_.data() + i * width_;
            brow[row.index(key)] += inc;
            grid_[i * width_ + pos].update(brow[pos], interval);
            brow[pos] = 0;
        }
        t_ = t;
        counter_updates_ += rows_.size();
        buffer_ops_ += 2 * rows_.size();
    }

    double query(std::uint64_t key) const {
        std::array<double, kMaxDepth> readings{};
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto& row = rows_[i];
            const double v = grid_[i * width_ + row.index(key)].query();
            readings[i] = kind_ == SketchKind::CountMin ? v : row.sign(key) * v;
        }
        return detail::aggregate_readings(kind_, readings, depth());
    }

    SketchKind kind() const { return kind_; }
    int depth() const { return static_cast<int>(rows_.size()); }
    std::uint64_t width() const { return width_; }
    std::uint64_t capacity() const { return capacity_; }
    std::uint64_t counter_capacity() const { return grid_.front().capacity(); }
    std::uint64_t t_now() const { return t_; }
    const std::vector<HashRow>& rows() const { return rows_; }
    double sigma() const { return grid_.front().sigma(); }
    std::uint64_t memory_words() const { return lazy_sketch_words(depth(), width_, capacity_); }
    std::uint64_t counter_updates() const { return counter_updates_; }
    std::uint64_t buffer_ops() const { return buffer_ops_; }

    std::int64_t buffer_cell(int i, std::uint64_t j) const {
        return buffer_[static_cast<std::size_t>(i) * width_ + j];
    }
    double cell_release(int i, std::uint64_t j) const {
        return grid_[static_cast<std::size_t>(i) * width_ + j].query();
    }

    std::uint64_t nodes_created() const {
        std::uint64_t n = 0;
        for (const auto& c : grid_) n += c.nodes_created();
        return n;
    }

  private:
    SketchKind kind_;
    std::uint64_t width_;
    std::uint64_t capacity_;
    std::uint64_t t_ = 0;
    std::vector<HashRow> rows_;
    std::vector<BinaryMechanismCounter> grid_;
    std::vector<std::int64_t> buffer_;
    std::uint64_t counter_updates_ = 0;
    std::uint64_t buffer_ops_ = 0;
};

}  // namespace codp
