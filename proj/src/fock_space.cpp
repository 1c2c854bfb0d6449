#include "qtrans/fock_space.hpp"

#include <fmt/format.h>

#include "qtrans/errors.hpp"

namespace qtrans {

TruncatedFockSpace::TruncatedFockSpace(int modes, int n_max) : modes_(modes), n_max_(n_max), dim_(1) {
    if (modes < 1 || n_max < 1) throw DomainError("Fock space needs >= 1 mode and n_max >= 1");
    strides_.assign(static_cast<std::size_t>(modes), 1);
    const auto levels = static_cast<std::size_t>(n_max) + 1;
    for (int k = modes - 1; k >= 0; --k) {
        strides_[static_cast<std::size_t>(k)] = dim_;
        if (dim_ > kMaxDimension / levels)
            throw ResourceError(fmt::format("Fock space dimension ({}+1)^{} exceeds guard {}", n_max,
                                            modes, kMaxDimension));
        dim_ *= levels;
    }
}

std::size_t TruncatedFockSpace::encode(const std::vector<int>& occupation) const {
    if (occupation.size() != static_cast<std::size_t>(modes_))
        throw DomainError("Fock occupation has wrong number of modes");
    std::size_t index = 0;
    for (int k = 0; k < modes_; ++k) {
        const int n = occupation[static_cast<std::size_t>(k)];
        if (n < 0 || n > n_max_) throw DomainError("Fock occupation outside cutoff");
        index += static_cast<std::size_t>(n) * strides_[static_cast<std::size_t>(k)];
    }
    return index;
}

std::vector<int> TruncatedFockSpace::decode(std::size_t index) const {
    std::vector<int> occ(static_cast<std::size_t>(modes_));
    for (int k = 0; k < modes_; ++k) occ[static_cast<std::size_t>(k)] = occupation(index, k);
    return occ;
}

int TruncatedFockSpace::occupation(std::size_t index, int mode) const {
    const auto levels = static_cast<std::size_t>(n_max_) + 1;
    return static_cast<int>((index / strides_[static_cast<std::size_t>(mode)]) % levels);
}

} // namespace qtrans
