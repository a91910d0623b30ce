#include "jumpeuler/rng.hpp"

namespace jumpeuler {
namespace {

inline std::uint64_t splitmix_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

namespace detail {

ZigguratTables::ZigguratTables() {
    const double r = 3.6541528853610088;
    const double v = 0.00492867323399228747;
    auto pdf = [](double t) { return std::exp(-0.5 * t * t); };
    x[0] = v / pdf(r);
    x[1] = r;
    f[0] = pdf(r);
    f[1] = pdf(r);
    for (int i = 2; i < 256; ++i) {
        x[i] = std::sqrt(-2.0 * std::log(v / x[i - 1] + pdf(x[i - 1])));
        f[i] = pdf(x[i]);
    }
    x[256] = 0.0;
    f[256] = 1.0;
}

const ZigguratTables zig_normal;

// Wedge and tail handling; reached for ~1.5% of draws.
double normal_slow_path(std::uint64_t bits, void* stream) {
    auto& rs = *static_cast<RandomStream*>(stream);
    const auto& zig = zig_normal;
    for (;;) {
        const int i = static_cast<int>(bits & 0xff);
        const double sign = (bits & 0x100) ? -1.0 : 1.0;
        const double u = static_cast<double>(bits >> 11) * kInv53;
        const double x = u * zig.x[i];
        if (x < zig.x[i + 1]) return sign * x;
        if (i == 0) {
            // Base layer: sample the tail beyond R (Marsaglia tail method).
            const double r = zig.x[1];
            double xt, yt;
            do {
                xt = -std::log(rs.uniform_open()) / r;
                yt = -std::log(rs.uniform_open());
            } while (yt + yt < xt * xt);
            return sign * (r + xt);
        }
        if (zig.f[i + 1] + (zig.f[i] - zig.f[i + 1]) * rs.uniform01() < std::exp(-0.5 * x * x))
            return sign * x;
        bits = rs.next_u64();
    }
}

}  // namespace detail

RandomStream::RandomStream(const StreamKey& key) {
    // Absorb the three key components through the avalanche before expanding
    // to the 256-bit generator state.
    std::uint64_t h = key.base_seed;
    h = mix_seed(h, 0x6a09e667f3bcc908ULL + key.trajectory_index);
    h = mix_seed(h, 0xbb67ae8584caa73bULL + static_cast<std::uint64_t>(key.channel));
    s_[0] = splitmix_next(h);
    s_[1] = splitmix_next(h);
    s_[2] = splitmix_next(h);
    s_[3] = splitmix_next(h);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t state = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    std::uint64_t out = splitmix_next(state);
    return out ^ splitmix_next(state);
}

}  // namespace jumpeuler
