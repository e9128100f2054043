#pragma once

#include <cstdint>
#include <string_view>

namespace unisplit {

// Counter-based generator: output k of stream (seed, stream) is the SplitMix64
// finalizer of a key derived from both plus k times the golden gamma. No state
// beyond the counter, so every (seed, purpose) pair is an independent,
// platform-independent substream.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // uniform on the open interval (0, 1)
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t counter() const { return counter_; }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // FNV-1a, for naming substreams by purpose
    static constexpr std::uint64_t hash(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

inline CounterRng substream(std::uint64_t seed, std::string_view purpose, std::uint64_t attempt = 0) {
    return CounterRng(seed, CounterRng::hash(purpose) + attempt);
}

}  // namespace unisplit
