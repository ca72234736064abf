#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace celltraj {

// Generator identity; bump the version if the stream layout or the sampling
// transforms change, since stored seeds would no longer reproduce outputs.
inline constexpr const char* kRngName = "splitmix64-boxmuller";
inline constexpr int kRngVersion = 1;

// Stream tags. A stream is derived by chaining the root seed with a tag and
// the coordinates that identify the consumer:
//   labels at (run, t):            derive_stream(seed, {kStreamLabels, run, t})
//   expressions of cell i at (run, t):
//                                  derive_stream(seed, {kStreamExpr, run, t, i})
// so every (run, time, cell) owns an independent stream and Monte Carlo runs
// can be sampled in any order or in parallel.
inline constexpr std::uint64_t kStreamLabels = 0x4c41424cull;
inline constexpr std::uint64_t kStreamExpr = 0x45585052ull;

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t derive_stream(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = seed;
    for (std::uint64_t p : path) s = detail::mix64(s + detail::kGolden * (p + 1));
    return s;
}

// SplitMix64 stream with Box-Muller normals. Cheap to construct; all state is
// one counter, so streams never interact.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - next_double();  // (0, 1], keeps the log finite
        double u2 = next_double();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace celltraj
