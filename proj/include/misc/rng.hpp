#pragma once

// Portable random streams. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; bounded integers, doubles and shuffles are derived
// here rather than through <random> distributions, which are
// implementation-defined. Per-trial streams are seeded with
// splitmix64(splitmix64(master) ^ trial).

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace misc {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) noexcept
{
    return splitmix64(splitmix64(master) ^ stream);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t master, std::uint64_t stream) : engine_(stream_seed(master, stream)) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, n) by rejection; n must be > 0.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do x = engine_();
        while (x >= limit);
        return x % n;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Fisher-Yates, last element first.
    template <typename T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace misc
