// fock_space.hpp — index codec for a product of truncated oscillator Fock spaces

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qtrans {

// Product Fock space of `modes` oscillators truncated at n_max quanta each.
// Mode 0 is the most significant digit of the flat index.
class TruncatedFockSpace {
public:
    static constexpr std::size_t kMaxDimension = 1'000'000;

    TruncatedFockSpace(int modes, int n_max);

    int modes() const noexcept { return modes_; }
    int n_max() const noexcept { return n_max_; }
    std::size_t dim() const noexcept { return dim_; }

    std::size_t encode(const std::vector<int>& occupation) const;
    std::vector<int> decode(std::size_t index) const;
    int occupation(std::size_t index, int mode) const;
    std::size_t stride(int mode) const { return strides_[static_cast<std::size_t>(mode)]; }

private:
    int modes_;
    int n_max_;
    std::size_t dim_;
    std::vector<std::size_t> strides_;
};

using DensityMatrix = Eigen::MatrixXcd;

} // namespace qtrans
