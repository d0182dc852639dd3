#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace codp {

// Smallest h with T+1 <= 2^h, i.e. ceil(log2(T+1)). Height of the dyadic
// interval tree a counter of capacity T needs. Integer-exact.
inline int tree_height(std::uint64_t capacity) {
    if (capacity == 0) throw std::invalid_argument("capacity must be >= 1");
    return std::bit_width(capacity);
}

// Node slots a counter preallocates, one per tree level.
inline int tree_levels(std::uint64_t capacity) {
    return tree_height(capacity) + 1;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stable seed derivation: every structure hashes (master, tag, indices) so
// that identical (seed, role) pairs always yield identical sub-generators.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t i = 0, std::uint64_t j = 0) {
    std::uint64_t s = master;
    splitmix64(s);
    s ^= 0x5851f42d4c957f2dull * (tag + 1);
    splitmix64(s);
    s ^= 0x14057b7ef767814full * (i + 1);
    splitmix64(s);
    s ^= 0x27bb2ee687b0b0fdull * (j + 1);
    return splitmix64(s);
}

// xoshiro256++ (Blackman/Vigna). Small, fast, and fully reproducible from
// the seed; no libstdc++ distribution machinery anywhere near the outputs.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0,1), 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Gaussian draws via the Marsaglia polar transform: draw (u,v) uniform on
// the square until 0 < u^2+v^2 < 1, then u*sqrt(-2 ln s / s) is standard
// normal and the v term is kept as a spare. Deterministic given the seed;
// no hidden global state. sigma == 0 short-circuits to exactly 0.0 and
// consumes no randomness, which is the contract noise-off runs rely on.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double sample(double sigma) {
        if (sigma == 0.0) return 0.0;
        return sigma * next_standard();
    }

    double next_standard() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng_.next_unit() - 1.0;
            v = 2.0 * rng_.next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

  private:
    Xoshiro256pp rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct PrivacyParams {
    double epsilon = 1.0;
    double delta = 1e-3;

    void validate() const {
        if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
        if (!(delta > 0.0) || !(delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
    }
};

// Explicit noise scale. sigma = 0 is the supported noise-off mode for
// tests and oracle comparisons; production calibration never produces it.
struct NoiseScale {
    double sigma = 0.0;

    void validate() const {
        if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    }
};

// Per-node noise scale for a tree counter of capacity T whose input may
// change in at most m update values between neighboring streams:
//   sigma = sqrt(2 * h * m * ln(1.25/delta)) / epsilon,  h = ceil(log2(T+1)).
inline double calibrate_sigma(std::uint64_t capacity, const PrivacyParams& p, int sensitivity) {
    p.validate();
    if (sensitivity < 1) throw std::invalid_argument("sensitivity must be >= 1");
    const double h = static_cast<double>(tree_height(capacity));
    const double m = static_cast<double>(sensitivity);
    return std::sqrt(2.0 * h * m * std::log(1.25 / p.delta)) / p.epsilon;
}

}  // namespace codp
