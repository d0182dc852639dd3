#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "codp/hashing.hpp"

namespace codp {

enum class SketchKind { CountMin, CountSketch };

constexpr int kMaxDepth = 64;

inline std::int64_t lower_median(std::array<std::int64_t, kMaxDepth>& v, int d) {
    const int idx = (d - 1) / 2;
    std::nth_element(v.begin(), v.begin() + idx, v.begin() + d);
    return v[idx];
}

// Non-private count-min / count sketch over 64-bit keys.
class PlainSketch {
  public:
    PlainSketch(SketchKind kind, int depth, std::uint64_t width, std::uint64_t seed)
        : PlainSketch(kind, make_rows(seed, depth, width)) {}

    PlainSketch(SketchKind kind, std::vector<HashRow> rows)
        : kind_(kind), rows_(std::move(rows)) {
        if (rows_.empty() || rows_.size() > kMaxDepth)
            throw std::invalid_argument("depth must be in [1,64]");
        width_ = rows_.front().width;
        for (const auto& r : rows_)
            if (r.width != width_) throw std::invalid_argument("rows must share one width");
        table_.assign(rows_.size() * width_, 0);
    }

    void update(std::uint64_t key, std::int64_t weight = 1) {
        if (kind_ == SketchKind::CountMin && weight < 1)
            throw std::invalid_argument("count-min updates must have weight >= 1");
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto& row = rows_[i];
            const std::uint64_t j = row.index(key);
            const std::int64_t inc = kind_ == SketchKind::CountMin ? weight : row.sign(key) * weight;
            table_[i * width_ + j] += inc;
        }
        ++t_;
    }

    std::int64_t query(std::uint64_t key) const {
        if (kind_ == SketchKind::CountMin) {
            std::int64_t best = INT64_MAX;
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                const std::int64_t v = table_[i * width_ + rows_[i].index(key)];
                best = std::min(best, v);
            }
            return best;
        }
        std::array<std::int64_t, kMaxDepth> readings{};
        for (std::size_t i = 0; i < rows_.size(); ++i)
            readings[i] = rows_[i].sign(key) * table_[i * width_ + rows_[i].index(key)];
        return lower_median(readings, static_cast<int>(rows_.size()));
    }

    SketchKind kind() const { return kind_; }
    int depth() const { return static_cast<int>(rows_.size()); }
    std::uint64_t width() const { return width_; }
    std::uint64_t t_now() const { return t_; }
    const std::vector<HashRow>& rows() const { return rows_; }
    std::int64_t cell(int i, std::uint64_t j) const { return table_[static_cast<std::size_t>(i) * width_ + j]; }

    std::int64_t row_sum(int i) const {
        std::int64_t s = 0;
        for (std::uint64_t j = 0; j < width_; ++j) s += cell(i, j);
        return s;
    }

    std::uint64_t memory_words() const { return rows_.size() * width_; }

  private:
    SketchKind kind_;
    std::vector<HashRow> rows_;
    std::uint64_t width_ = 0;
    std::uint64_t t_ = 0;
    std::vector<std::int64_t> table_;
};

// Non-private top-k tracker: a count-min sketch plus a size-k heap keyed by
// the sketch estimate. A key's stored estimate refreshes only when the key
// arrives again; eviction replaces the current minimum.
class HeapHeavyHitters {
  public:
    HeapHeavyHitters(int k, int depth, std::uint64_t width, std::uint64_t seed)
        : k_(k), sketch_(SketchKind::CountMin, depth, width, seed) {
        if (k < 1) throw std::invalid_argument("k must be >= 1");
    }

    void update(std::uint64_t key) {
        sketch_.update(key, 1);
        const std::int64_t est = sketch_.query(key);
        auto it = where_.find(key);
        if (it != where_.end()) {
            heap_.erase(it->second);
            it->second = heap_.emplace(est, key);
            return;
        }
        if (where_.size() < static_cast<std::size_t>(k_)) {
            where_[key] = heap_.emplace(est, key);
            return;
        }
        const auto lowest = heap_.begin();
        if (est > lowest->first) {
            where_.erase(lowest->second);
            heap_.erase(lowest);
            where_[key] = heap_.emplace(est, key);
        }
    }

    // Tracked keys whose stored estimate reaches the t/k heavy threshold,
    // highest estimate first (ties: smaller key first).
    std::vector<std::pair<std::uint64_t, std::int64_t>> report(std::uint64_t t) const {
        const double threshold = static_cast<double>(t) / static_cast<double>(k_);
        std::vector<std::pair<std::uint64_t, std::int64_t>> out;
        for (const auto& [est, key] : heap_)
            if (static_cast<double>(est) >= threshold) out.emplace_back(key, est);
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        return out;
    }

    int k() const { return k_; }
    std::size_t tracked() const { return where_.size(); }
    const PlainSketch& sketch() const { return sketch_; }

  private:
    int k_;
    PlainSketch sketch_;
    std::multiset<std::pair<std::int64_t, std::uint64_t>> heap_;
    std::unordered_map<std::uint64_t, std::multiset<std::pair<std::int64_t, std::uint64_t>>::iterator> where_;
};

}  // namespace codp
