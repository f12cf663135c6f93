#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace efftune {

/// Seeded generator with platform-independent draws.
///
/// std::uniform_*_distribution is implementation-defined, so the helpers
/// below derive values straight from the engine bits. Same seed, same
/// stream, on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t below(std::size_t n);

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// FNV-1a over the bytes of a string.
std::uint64_t hash_text(std::string_view text);

/// Order-sensitive combination of seed components (splitmix64 finalizer).
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

}  // namespace efftune
