#include "baddr/rng.hpp"

#include <cassert>
#include <cmath>
#include <numeric>

namespace baddr {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t hash_label(std::string_view label) noexcept {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

RngStream RngStream::split(std::uint64_t label) const {
    return RngStream(mix64(seed_ ^ mix64(label + 0x632be59bd9b4e019ULL)));
}

RngStream RngStream::split(std::string_view label) const { return split(hash_label(label)); }

std::size_t RngStream::uniform_index(std::size_t n) {
    assert(n > 0);
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
}

std::size_t RngStream::categorical(std::span<const double> weights) {
    assert(!weights.empty());
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u < 0.0) return i;
    }
    // Rounding left a sliver of mass; return the last positive entry.
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0.0) return i;
    return weights.size() - 1;
}

double RngStream::gamma(double shape) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(*this);
}

double RngStream::beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
}

}  // namespace baddr
