#pragma once

#include <cstdint>
#include <string_view>

namespace galgeo {

inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-based generator: draw i of stream (seed, task) is a pure function of
// (seed, task, i), so samples do not depend on how work is partitioned.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t task) : seed_(seed), task_(task) {}
    CounterRng(std::uint64_t seed, std::string_view task) : CounterRng(seed, fnv1a64(task)) {}

    std::uint64_t at(std::uint64_t i) const {
        return splitmix64(splitmix64(seed_ ^ 0x6a09e667f3bcc908ull) ^ splitmix64(task_) ^ i);
    }

    // Uniform value in [0, bound) via fixed-point multiply; bound > 0.
    std::uint64_t below(std::uint64_t bound, std::uint64_t i) const {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(at(i)) * bound) >> 64);
    }

private:
    std::uint64_t seed_;
    std::uint64_t task_;
};

}  // namespace galgeo
