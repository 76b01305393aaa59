#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace baddr {

/// Category index per feature. Small inline storage keeps simulation loops
/// free of heap traffic for the domains shipped here. Converts to a span
/// for read-only use.
class FeatureValues : public boost::container::small_vector<int, 12> {
public:
    using Base = boost::container::small_vector<int, 12>;
    using Base::Base;
    FeatureValues() = default;
    FeatureValues(std::initializer_list<int> values) : Base(values) {}
    FeatureValues(std::span<const int> values) : Base(values.begin(), values.end()) {}

    operator std::span<const int>() const noexcept { return {data(), size()}; }
};

/// Per-feature category counts of a discrete factored space.
class FeatureSpace {
public:
    FeatureSpace() = default;
    explicit FeatureSpace(std::vector<int> cardinalities);

    std::size_t feature_count() const noexcept { return cardinalities_.size(); }
    const std::vector<int>& cardinalities() const noexcept { return cardinalities_; }
    int cardinality(std::size_t feature) const { return cardinalities_[feature]; }

    /// Start of feature i's block in the one-hot encoding.
    int offset(std::size_t feature) const { return offsets_[feature]; }

    /// Length of the one-hot encoding (sum of cardinalities).
    int onehot_width() const noexcept { return width_; }

    /// Number of joint values (product of cardinalities).
    std::uint64_t joint_size() const noexcept { return joint_size_; }

    bool contains(std::span<const int> values) const noexcept;

    /// Throws std::out_of_range if `values` is not a member of the space.
    void check(std::span<const int> values) const;

    std::uint64_t flat_index(std::span<const int> values) const;
    FeatureValues unflatten(std::uint64_t index) const;

    /// Uniform draw over the joint space.
    template <class Rng>
    FeatureValues sample_uniform(Rng& rng) const {
        FeatureValues v(cardinalities_.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(cardinalities_[i])));
        return v;
    }

    bool operator==(const FeatureSpace& other) const { return cardinalities_ == other.cardinalities_; }

private:
    std::vector<int> cardinalities_;
    std::vector<int> offsets_;
    int width_ = 0;
    std::uint64_t joint_size_ = 1;
};

/// A value together with the cardinalities it is drawn from.
struct FeatureVector {
    std::vector<int> values;
    std::vector<int> cardinalities;
};

/// Concatenated per-feature one-hot blocks. Throws std::out_of_range on an
/// out-of-range or mis-sized value.
std::vector<double> onehot_encode(const FeatureVector& v);

/// Writes the one-hot blocks of `values` into `out` starting at `offset`
/// (out must already be zeroed over that range).
void onehot_write(const FeatureSpace& space, std::span<const int> values, std::span<double> out,
                  std::size_t offset);

}  // namespace baddr
