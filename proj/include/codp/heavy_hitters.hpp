#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "codp/private_sketch.hpp"

namespace codp {

// Sketch depth for the heavy-hitter tracker: ceil(log2(4T/beta)).
inline int hh_depth(std::uint64_t capacity, double beta) {
    if (!(beta > 0.0) || !(beta < 1.0)) throw std::invalid_argument("beta must be in (0,1)");
    return static_cast<int>(std::ceil(std::log2(4.0 * static_cast<double>(capacity) / beta)));
}

// High-probability bound on |estimate - true frequency| for candidates,
// used to build the admission thresholds:
//   gamma = (3 log2(T/ktilde) / eps) * sqrt(d ln(4Td/beta) log2(1.25/delta)).
inline double hh_gamma(std::uint64_t capacity, std::uint64_t ktilde, const PrivacyParams& p,
                       double beta) {
    p.validate();
    const int d = hh_depth(capacity, beta);
    const double T = static_cast<double>(capacity);
    const double inner = d * std::log(4.0 * T * d / beta) * std::log2(1.25 / p.delta);
    return 3.0 * std::log2(T / static_cast<double>(ktilde)) / p.epsilon * std::sqrt(inner);
}

struct HhThresholds {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double tau = 0.0;  // admit iff estimate > tau
};

inline HhThresholds hh_thresholds(std::uint64_t t, int k, std::uint64_t ktilde, double gamma) {
    HhThresholds th;
    const double td = static_cast<double>(t);
    const double kt = static_cast<double>(ktilde);
    th.lambda1 = gamma + kt;
    th.lambda2 = 2.0 * td / kt + gamma;
    th.tau1 = td / static_cast<double>(k);
    th.tau2 = td / kt + th.lambda1 + 2.0 * th.lambda2;
    th.tau = std::max(th.tau1, th.tau2) + 1.0;
    return th;
}

struct HhConfig {
    int k = 32;
    std::uint64_t ktilde = 128;
    std::uint64_t capacity = 1 << 20;
    PrivacyParams privacy;
    double beta = 5e-4;
    std::uint64_t seed = 1;
};

struct HhItem {
    std::uint64_t key = 0;
    double estimate = 0.0;
};

// Continual-observation heavy hitter tracker. Every arriving key enters a
// candidate pool; every ktilde arrivals the pool is scored against the
// private sketch, keys whose estimate clears the admission threshold form
// the new output, and the pool shrinks back to the ktilde highest-scoring
// candidates. Between refreshes the output is returned unchanged, so key
// arrivals cost d counter pushes plus pool bookkeeping.
class LazyHeavyHitters {
  public:
    explicit LazyHeavyHitters(const HhConfig& cfg, NoiseScale noise)
        : cfg_(cfg),
          sketch_(SketchKind::CountMin, hh_depth(cfg.capacity, cfg.beta), cfg.ktilde,
                  cfg.capacity, noise, cfg.seed),
          gamma_(hh_gamma(cfg.capacity, cfg.ktilde, cfg.privacy, cfg.beta)) {
        if (cfg.k < 1) throw std::invalid_argument("k must be >= 1");
        if (cfg.ktilde < static_cast<std::uint64_t>(cfg.k))
            throw std::invalid_argument("ktilde must be >= k");
        candidates_.reserve(2 * cfg.ktilde + 1);
    }

    explicit LazyHeavyHitters(const HhConfig& cfg)
        : LazyHeavyHitters(cfg, NoiseScale{calibrate_sigma(
                                    ceil_div(cfg.capacity, cfg.ktilde), cfg.privacy,
                                    2 * hh_depth(cfg.capacity, cfg.beta))}) {}

    const std::vector<HhItem>& update(std::uint64_t key) {
        sketch_.update(key);
        candidates_.insert(key);
        const std::uint64_t t = sketch_.t_now();
        if (t % cfg_.ktilde == 0) {
            scored_ = score_candidates();
            output_ = admit(scored_, t);
            shrink(scored_);
            ++refreshes_;
        }
        return output_;
    }

    // Scores the current pool and applies the admission threshold for time
    // t without touching tracker state.
    std::vector<HhItem> refresh_output(std::uint64_t t) const {
        auto scored = score_candidates();
        return admit(scored, t);
    }

    const std::vector<HhItem>& report() const { return output_; }
    const std::unordered_set<std::uint64_t>& candidates() const { return candidates_; }
    double gamma() const { return gamma_; }
    int depth() const { return sketch_.depth(); }
    std::uint64_t t_now() const { return sketch_.t_now(); }
    std::uint64_t refreshes() const { return refreshes_; }
    const LazySketch& sketch() const { return sketch_; }
    const HhConfig& config() const { return cfg_; }

    HhThresholds thresholds(std::uint64_t t) const {
        return hh_thresholds(t, cfg_.k, cfg_.ktilde, gamma_);
    }

    // Instrumentation: sketch pushes plus estimate reads plus pool edits.
    std::uint64_t work_ops() const {
        return sketch_.counter_updates() + sketch_.buffer_ops() + pool_ops_ + score_ops_;
    }

    void update_all(const std::vector<std::uint64_t>& keys) {
        for (const auto k : keys) update(k);
    }

  private:
    std::vector<HhItem> score_candidates() const {
        std::vector<HhItem> scored;
        scored.reserve(candidates_.size());
        for (const std::uint64_t key : candidates_) scored.push_back({key, sketch_.query(key)});
        std::sort(scored.begin(), scored.end(), [](const HhItem& a, const HhItem& b) {
            if (a.estimate != b.estimate) return a.estimate > b.estimate;
            return a.key < b.key;
        });
        score_ops_ += scored.size() * static_cast<std::uint64_t>(sketch_.depth());
        return scored;
    }

    std::vector<HhItem> admit(const std::vector<HhItem>& scored, std::uint64_t t) const {
        const HhThresholds th = thresholds(t);
        std::vector<HhItem> out;
        for (const auto& item : scored) {
            if (item.estimate > th.tau) out.push_back(item);
            else break;  // scored is sorted by estimate
        }
        return out;
    }

    void shrink(const std::vector<HhItem>& scored) {
        candidates_.clear();
        const std::size_t keep = std::min<std::size_t>(scored.size(), cfg_.ktilde);
        for (std::size_t i = 0; i < keep; ++i) candidates_.insert(scored[i].key);
        pool_ops_ += keep;
    }

    HhConfig cfg_;
    LazySketch sketch_;
    double gamma_;
    std::unordered_set<std::uint64_t> candidates_;
    std::vector<HhItem> scored_;
    std::vector<HhItem> output_;
    std::uint64_t refreshes_ = 0;
    mutable std::uint64_t pool_ops_ = 0;
    mutable std::uint64_t score_ops_ = 0;
};

}  // namespace codp
