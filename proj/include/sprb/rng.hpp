#pragma once
#include <cstdint>
#include <cmath>

namespace sprb {

// xoshiro256++ with splitmix64 seeding. Fast enough that the Gaussian
// sampler, not the generator, dominates the cost of a draw.
class Rng {
public:
    Rng() : Rng(0xdeadbeefcafef00dULL) {}

    explicit Rng(uint64_t seed) { reseed(seed); }

    void reseed(uint64_t seed) {
        uint64_t z = seed;
        for (auto& w : state_) w = splitmix64(z);
        has_spare_ = false;
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_uniform01() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (-1, 1).
    double next_uniform_sym() {
        return double(next_u64() >> 11) * 0x1.0p-52 - 1.0;
    }

    // Standard normal via the Marsaglia polar method (exact, caches the
    // second draw of each pair).
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, q;
        do {
            u = next_uniform_sym();
            v = next_uniform_sym();
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double f = std::sqrt(-2.0 * std::log(q) / q);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    bool next_bit() { return (next_u64() >> 63) != 0; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Derives a reproducible stream for one replication. Streams for distinct
// (master_seed, replication_index, stream_id) triples are statistically
// independent; replications reuse stream ids to share noise where wanted.
inline Rng derive_rng(uint64_t master_seed, uint64_t replication_index,
                      uint64_t stream_id = 0) {
    // mix the triple into a single 64-bit seed with distinct odd multipliers
    uint64_t s = master_seed;
    s = s * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
    s ^= replication_index * 0xff51afd7ed558ccdULL + 0x9e3779b97f4a7c15ULL;
    s = (s ^ (s >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    s ^= stream_id * 0x94d049bb133111ebULL + 0xda942042e4dd58b5ULL;
    return Rng(s);
}

} // namespace sprb
