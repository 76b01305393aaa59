#include "baddr/features.hpp"

#include <stdexcept>
#include <string>

namespace baddr {

FeatureSpace::FeatureSpace(std::vector<int> cardinalities) : cardinalities_(std::move(cardinalities)) {
    offsets_.reserve(cardinalities_.size());
    for (int c : cardinalities_) {
        if (c < 1) throw std::invalid_argument("feature cardinality must be positive");
        offsets_.push_back(width_);
        width_ += c;
        joint_size_ *= static_cast<std::uint64_t>(c);
    }
}

bool FeatureSpace::contains(std::span<const int> values) const noexcept {
    if (values.size() != cardinalities_.size()) return false;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] < 0 || values[i] >= cardinalities_[i]) return false;
    return true;
}

void FeatureSpace::check(std::span<const int> values) const {
    if (values.size() != cardinalities_.size())
        throw std::out_of_range("feature vector has " + std::to_string(values.size()) + " entries, expected " +
                                std::to_string(cardinalities_.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] < 0 || values[i] >= cardinalities_[i])
            throw std::out_of_range("feature " + std::to_string(i) + " value " + std::to_string(values[i]) +
                                    " outside [0, " + std::to_string(cardinalities_[i]) + ")");
}

std::uint64_t FeatureSpace::flat_index(std::span<const int> values) const {
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < cardinalities_.size(); ++i)
        index = index * static_cast<std::uint64_t>(cardinalities_[i]) + static_cast<std::uint64_t>(values[i]);
    return index;
}

FeatureValues FeatureSpace::unflatten(std::uint64_t index) const {
    FeatureValues v(cardinalities_.size());
    for (std::size_t i = cardinalities_.size(); i-- > 0;) {
        const auto c = static_cast<std::uint64_t>(cardinalities_[i]);
        v[i] = static_cast<int>(index % c);
        index /= c;
    }
    return v;
}

std::vector<double> onehot_encode(const FeatureVector& v) {
    const FeatureSpace space(v.cardinalities);
    space.check(v.values);
    std::vector<double> out(static_cast<std::size_t>(space.onehot_width()), 0.0);
    onehot_write(space, v.values, out, 0);
    return out;
}

void onehot_write(const FeatureSpace& space, std::span<const int> values, std::span<double> out,
                  std::size_t offset) {
    for (std::size_t i = 0; i < values.size(); ++i)
        out[offset + static_cast<std::size_t>(space.offset(i) + values[i])] = 1.0;
}

}  // namespace baddr
