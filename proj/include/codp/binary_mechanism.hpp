#pragma once

#include <cstdint>
#include <vector>

#include "codp/noise.hpp"

namespace codp {

struct TreeNode {
    std::uint64_t interval_lo = 0;
    std::uint64_t interval_hi = 0;
    std::int64_t count = 0;
    double noise = 0.0;
};

// Continual-release counter over a dyadic interval tree. After consuming
// t updates it stores exactly popcount(t) nodes, one per set bit of t; the
// node for bit l covers a width-2^l interval and carries a fresh Gaussian
// draw made when the node was created. A query sums count+noise over the
// stored nodes and never mutates anything, so repeated queries at the same
// t are identical.
//
// Update appends a leaf [t,t] and then carry-propagates: while the level-l
// slot is occupied, the two equal-width neighbors merge into one node with
// summed count and one fresh draw (the children's draws are discarded).
class BinaryMechanismCounter {
  public:
    BinaryMechanismCounter(std::uint64_t capacity, NoiseScale noise, std::uint64_t seed)
        : capacity_(capacity), sigma_(noise.sigma), sampler_(seed) {
        noise.validate();
        const int levels = tree_levels(capacity);
        counts_.assign(levels, 0);
        noises_.assign(levels, 0.0);
    }

    BinaryMechanismCounter(std::uint64_t capacity, const PrivacyParams& p, int sensitivity,
                           std::uint64_t seed)
        : BinaryMechanismCounter(capacity, NoiseScale{calibrate_sigma(capacity, p, sensitivity)},
                                 seed) {}

    void update(std::int64_t increment, std::uint64_t t) {
        if (t != t_ + 1) throw std::logic_error("counter updates must arrive in order");
        if (t > capacity_) throw std::out_of_range("counter capacity exceeded");
        std::int64_t c = increment;
        int level = 0;
        for (std::uint64_t prev = t_; prev & 1ull; prev >>= 1) {
            c += counts_[level];
            ++level;
        }
        counts_[level] = c;
        noises_[level] = sampler_.sample(sigma_);
        nodes_created_ += static_cast<std::uint64_t>(level) + 1;
        t_ = t;
    }

    double query() const {
        double total = 0.0;
        for (std::uint64_t bits = t_; bits != 0; bits &= bits - 1) {
            const int level = std::countr_zero(bits);
            total += static_cast<double>(counts_[level]) + noises_[level];
        }
        return total;
    }

    std::uint64_t t_now() const { return t_; }
    std::uint64_t capacity() const { return capacity_; }
    double sigma() const { return sigma_; }
    int node_count() const { return std::popcount(t_); }

    // Stored nodes in stream order (widest interval first).
    std::vector<TreeNode> nodes() const {
        std::vector<TreeNode> out;
        out.reserve(static_cast<std::size_t>(node_count()));
        std::uint64_t lo = 1;
        for (int level = std::bit_width(t_) - 1; level >= 0; --level) {
            if (!(t_ & (1ull << level))) continue;
            const std::uint64_t width = 1ull << level;
            out.push_back({lo, lo + width - 1, counts_[level], noises_[level]});
            lo += width;
        }
        return out;
    }

    // Instrumentation: nodes materialized so far (leaves + merges). Merge
    // chains within one update collapse to the surviving node, which gets
    // the single fresh draw; intermediate draws would never be released.
    std::uint64_t nodes_created() const { return nodes_created_; }

  private:
    std::uint64_t capacity_;
    std::uint64_t t_ = 0;
    double sigma_;
    std::vector<std::int64_t> counts_;
    std::vector<double> noises_;
    GaussianSampler sampler_;
    std::uint64_t nodes_created_ = 0;
};

// Runs n independent counters over a T-step update matrix and releases all
// n noisy prefix sums at every step. Each counter derives its own seed, so
// the whole release sequence is reproducible from (master_seed, shape).
inline std::vector<std::vector<double>> run_private_counters(
    const std::vector<std::vector<std::int64_t>>& updates, const PrivacyParams& p,
    int sensitivity, std::uint64_t master_seed) {
    const std::uint64_t steps = updates.size();
    if (steps == 0) throw std::invalid_argument("empty update sequence");
    const std::size_t n = updates.front().size();
    if (n == 0) throw std::invalid_argument("counter vectors must be non-empty");

    const double sigma = calibrate_sigma(steps, p, sensitivity);
    std::vector<BinaryMechanismCounter> counters;
    counters.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        counters.emplace_back(steps, NoiseScale{sigma}, derive_seed(master_seed, 0x6374ull, i));

    std::vector<std::vector<double>> releases(steps, std::vector<double>(n, 0.0));
    for (std::uint64_t t = 1; t <= steps; ++t) {
        const auto& row = updates[t - 1];
        if (row.size() != n) throw std::invalid_argument("ragged update matrix");
        for (std::size_t i = 0; i < n; ++i) {
            counters[i].update(row[i], t);
            releases[t - 1][i] = counters[i].query();
        }
    }
    return releases;
}

}  // namespace codp
