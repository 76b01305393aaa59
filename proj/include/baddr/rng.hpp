#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace baddr {

/// Seeded random stream with labeled splitting.
///
/// A stream is identified by its seed. `split(label)` derives a child from
/// the seed and the label only, so children do not depend on how many draws
/// the parent has already made. Identical seed plus identical call sequence
/// gives identical output.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    RngStream split(std::uint64_t label) const;
    RngStream split(std::string_view label) const;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Index drawn proportionally to `weights` (need not be normalized).
    std::size_t categorical(std::span<const double> weights);

    double gamma(double shape);
    double beta(double a, double b);

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used for seed derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace baddr
