#pragma once
#include <cstdint>
#include <cstddef>

namespace lab {

// splitmix64: seed expansion / key mixing
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// xoshiro256++ stream; seeded through splitmix64 so nearby keys give independent streams
struct Rng {
    std::uint64_t s[4];

    explicit Rng(std::uint64_t key = 0) { reseed(key); }
    void reseed(std::uint64_t key) {
        for (auto& w : s) w = splitmix64(key);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t next() {
        std::uint64_t r = rotl(s[0] + s[3], 23) + s[0];
        std::uint64_t t = s[1] << 17;
        s[2] ^= s[0]; s[3] ^= s[1]; s[1] ^= s[2]; s[0] ^= s[3];
        s[2] ^= t; s[3] = rotl(s[3], 45);
        return r;
    }

    // uniform in (0,1]; never 0 so log() is safe
    double u01() { return ((next() >> 11) + 1) * 0x1.0p-53; }

    double normal();                         // one standard normal (polar method, cached pair)
    void fill_normal(double* dst, std::size_t cnt);
    void fill_normal(float* dst, std::size_t cnt);

private:
    double cache_ = 0.0;
    bool have_ = false;
};

// Stream key for an independent generator: mixes (seed, family tag, purpose tag, index).
// Per-sample streams make ensemble results independent of worker count.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t family, std::uint64_t purpose, std::uint64_t idx) {
    std::uint64_t s = seed;
    std::uint64_t k = splitmix64(s) ^ family;
    k = splitmix64(k) ^ purpose;
    k = splitmix64(k) ^ idx;
    return splitmix64(k);
}

namespace tag {
// family tags
constexpr std::uint64_t wave = 0x57415645ull;         // 'WAVE'
constexpr std::uint64_t schrodinger = 0x53434852ull;  // 'SCHR'
// purpose tags
constexpr std::uint64_t gff = 0x01;
constexpr std::uint64_t increments = 0x02;
constexpr std::uint64_t auxiliary = 0x03;
} // namespace tag

} // namespace lab
