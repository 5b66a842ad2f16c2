#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace vrpgp {

// Every seeded stream in the project is an mt19937_64 engine. Distributions are
// implemented here rather than taken from <random> so that draws are identical
// across standard library implementations.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64;split=seed^splitmix64-fold";

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// FNV-1a, used to mix textual tags (strategy names, purposes) into seeds.
std::uint64_t hash_tag(std::string_view tag) noexcept;

// Order-sensitive fold of the parts through splitmix64.
std::uint64_t hash_parts(std::initializer_list<std::uint64_t> parts) noexcept;

// Stream splitting rule: child = base XOR hash(parts).
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept {
    return base ^ hash_parts(parts);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) { }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [lo, hi], unbiased (rejection on the low residue).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // Uniform index in [0, n).
    std::size_t index(std::size_t n);

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace vrpgp
