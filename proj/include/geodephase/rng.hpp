#pragma once

#include <cmath>
#include <cstdint>

namespace geodephase::rng {

// Splittable stream discipline (external reproducibility contract):
//   stream_seed(root, k) = mix64(root ^ mix64(k + 1))
//   state words of stream k = four successive SplitMix64(stream_seed) outputs.
// Trajectory k of an ensemble always draws from stream k, so results do not
// depend on how trajectories are scheduled across workers.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += kGolden);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

inline std::uint64_t stream_seed(std::uint64_t root_seed, std::uint64_t stream) {
    return mix64(root_seed ^ mix64(stream + 1));
}

// xoshiro256++ (Blackman & Vigna), seeded through SplitMix64.
class Xoshiro256pp {
  public:
    Xoshiro256pp() : Xoshiro256pp(0, 0) {}

    Xoshiro256pp(std::uint64_t root_seed, std::uint64_t stream) {
        SplitMix64 sm(stream_seed(root_seed, stream));
        bool all_zero = true;
        for (auto& word : s_) {
            word = sm.next();
            all_zero = all_zero && word == 0;
        }
        if (all_zero) s_[0] = kGolden;
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

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// Standard normal deviates via the Marsaglia polar method (no trig, keeps the
// stream consumption pattern simple and portable).
class NormalSampler {
  public:
    double operator()(Xoshiro256pp& gen) {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * gen.uniform01() - 1.0;
            v = 2.0 * gen.uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    void reset() { has_spare_ = false; }

  private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace geodephase::rng
