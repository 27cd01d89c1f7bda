#pragma once

// Per-shot RNG: the stream for shot i is derived from (master_seed, i) by a
// counter-based mix, so results do not depend on execution order or thread
// count.

#include <cstdint>
#include <random>

namespace entspec {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    return splitmix64(splitmix64(master) ^ splitmix64(counter + 0x9E3779B97F4A7C15ull));
}

class ShotRng {
  public:
    ShotRng(std::uint64_t master, std::uint64_t shot) : eng_(derive_seed(master, shot)) {}
    explicit ShotRng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(eng_); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_);
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace entspec
