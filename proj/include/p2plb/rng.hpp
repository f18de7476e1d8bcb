#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace p2plb {

// One splitmix64 step.  Used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Trial i of an experiment runs with seed = splitmix64(master + (i+1)*gamma),
// gamma being the splitmix64 increment.  This mapping is part of the output
// contract (recorded in run manifests) and must never change.
inline std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    std::uint64_t s = master_seed + (trial_index + 1) * 0x9e3779b97f4a7c15ULL;
    return splitmix64(s);
}

// Deterministic RNG used everywhere in the simulator.  mt19937_64 has a
// standard-specified sequence; the derived draws below are hand-rolled so the
// byte-for-byte reproducibility promise does not depend on unspecified
// library distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Unbiased integer in [0, n).  Rejection sampling, n > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    // Uniform in [0, 1), 53-bit resolution.
    double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // True with probability p.  Always consumes exactly one draw.
    bool chance(double p) { return real01() < p; }

    // Fisher-Yates; std::shuffle is implementation-defined, this is not.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }

private:
    std::mt19937_64 eng_;
};

} // namespace p2plb
