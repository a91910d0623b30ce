#pragma once

// Reproducible random streams.
//
// Every consumer of randomness addresses its stream by a StreamKey
// (base_seed, trajectory_index, channel). Distinct keys give statistically
// independent streams; the same key always gives the identical stream, so
// results cannot depend on thread count or work scheduling. Keys are hashed
// (SplitMix64 avalanche) into the generator state -- never offset-seeded.
//
// Draw order within a stream is part of the reproducibility contract of
// everything built on top. The hot paths are inline: trajectory kernels draw
// billions of normals, and keeping generator state in registers matters.

#include <cmath>
#include <cstdint>

namespace jumpeuler {

enum class Channel : std::uint64_t {
    WienerFine = 1,
    ThetaRare = 2,
    ThetaFine = 3,
    Jumps = 4,
    Marks = 5,
    Initial = 6,
};

struct StreamKey {
    std::uint64_t base_seed = 0;
    std::uint64_t trajectory_index = 0;
    Channel channel = Channel::WienerFine;

    StreamKey with_channel(Channel c) const { return {base_seed, trajectory_index, c}; }
};

// Avalanche mix used for key derivation and for deriving auxiliary seeds
// (e.g. per-row seeds in experiment schedules).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

namespace detail {

// 256-layer ziggurat tables for the standard normal. x[0] = V/f(R) is the
// pseudo-width of the base layer, x[1] = R, x[256] = 0, f[i] = exp(-x_i^2/2).
struct ZigguratTables {
    double x[257];
    double f[257];
    ZigguratTables();
};
extern const ZigguratTables zig_normal;

inline constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

// Moves bit 8 of `bits` into the IEEE-754 sign bit of x (x >= 0 on entry).
inline double apply_sign(double x, std::uint64_t bits) {
    std::uint64_t raw;
    __builtin_memcpy(&raw, &x, sizeof raw);
    raw ^= (bits & 0x100u) << 55;
    __builtin_memcpy(&x, &raw, sizeof raw);
    return x;
}

double normal_slow_path(std::uint64_t bits, void* stream);

}  // namespace detail

// xoshiro256++ with key-derived state.
class RandomStream {
  public:
    explicit RandomStream(const StreamKey& key);

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

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * detail::kInv53; }

    // Uniform on (0, 1]; safe to take logarithms of.
    double uniform_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * detail::kInv53;
    }

    // Standard normal via the ziggurat. Low 8 bits of one u64 pick the layer,
    // bit 8 the sign, bits 11..63 the uniform; ~98.5% of draws take the
    // rectangle fast path. Sign is applied by flipping the IEEE sign bit so
    // the fast path carries no unpredictable branch.
    double normal() {
        const std::uint64_t bits = next_u64();
        const int i = static_cast<int>(bits & 0xff);
        const double u = static_cast<double>(bits >> 11) * detail::kInv53;
        const double x = u * detail::zig_normal.x[i];
        if (x < detail::zig_normal.x[i + 1]) return detail::apply_sign(x, bits);
        return detail::normal_slow_path(bits, this);
    }

    // Exponential with unit rate.
    double exponential() { return -std::log(uniform_open()); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace jumpeuler
