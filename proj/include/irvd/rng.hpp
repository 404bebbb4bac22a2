#ifndef IRVD_RNG_HPP
#define IRVD_RNG_HPP

#include <cstdint>
#include <cmath>

// Self-contained seeded RNG (xoshiro256++ with splitmix64 seeding) so that
// every stream in the simulator is reproducible from a single 64-bit seed
// and independent substreams can be derived per component / droplet / tile.

namespace irvd {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Fixed, documented derivation of a substream seed from (seed, tag).
// Used for the master-seed -> component-seed split and for per-droplet /
// per-tile / per-trial substreams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (tag + 1));
    std::uint64_t a = splitmix64_next(s);
    std::uint64_t b = splitmix64_next(s);
    return a ^ (b >> 1);
}

// Component tags for sub-seed derivation from ScenarioConfig::master_seed.
namespace seed_tag {
inline constexpr std::uint64_t emission = 0x01;
inline constexpr std::uint64_t binding  = 0x02;
inline constexpr std::uint64_t noise    = 0x03;
inline constexpr std::uint64_t trial    = 0x04;
}  // namespace seed_tag

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
        // all-zero state is invalid for xoshiro; splitmix makes it
        // astronomically unlikely, but guard anyway
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next_u64() {
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

    // uniform in [0, 1), 53-bit resolution
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; second value of each pair is cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace irvd

#endif  // IRVD_RNG_HPP
