#ifndef SELFAFFINE_RNG_HPP
#define SELFAFFINE_RNG_HPP

#include <cmath>
#include <cstdint>

namespace selfaffine {

// Philox4x32-10 counter-based generator (Salmon et al.). Chosen because runs
// must be replayable from (seed, stream) alone and parallel workers need
// independent streams without handing state around. The generator name is
// recorded in output metadata next to the seed.
class Philox {
public:
    static constexpr const char* kName = "philox4x32-10";

    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    // Same seed, disjoint counter space.
    Philox derive(std::uint64_t stream) const {
        std::uint64_t seed = (static_cast<std::uint64_t>(key1_) << 32) | key0_;
        return Philox(seed, stream);
    }

    std::uint32_t next_u32() {
        if (avail_ == 0) refill();
        return out_[--avail_];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Marsaglia's polar method; pairs are consumed in
    // draw order so the stream stays reproducible.
    double next_gaussian() {
        if (have_gauss_) {
            have_gauss_ = false;
            return gauss_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        gauss_ = v * f;
        have_gauss_ = true;
        return u * f;
    }

    // Uniform index in [0, n).
    std::uint32_t next_below(std::uint32_t n) {
        // rejection to avoid modulo bias
        std::uint32_t limit = 0xFFFFFFFFu - (0xFFFFFFFFu % n);
        std::uint32_t x;
        do { x = next_u32(); } while (x >= limit);
        return x % n;
    }

private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void refill() {
        std::uint32_t c0 = static_cast<std::uint32_t>(counter_);
        std::uint32_t c1 = static_cast<std::uint32_t>(counter_ >> 32);
        std::uint32_t c2 = stream_lo_;
        std::uint32_t c3 = stream_hi_;
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, c0, hi0, lo0);
            mulhilo(0xCD9E8D57u, c2, hi1, lo1);
            std::uint32_t n0 = hi1 ^ c1 ^ k0;
            std::uint32_t n1 = lo1;
            std::uint32_t n2 = hi0 ^ c3 ^ k1;
            std::uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
        avail_ = 4;
        ++counter_;
    }

    std::uint32_t key0_, key1_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t counter_ = 0;
    std::uint32_t out_[4] = {};
    int avail_ = 0;
    bool have_gauss_ = false;
    double gauss_ = 0.0;
};

} // namespace selfaffine

#endif
