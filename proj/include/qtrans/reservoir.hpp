// reservoir.hpp — identical thermal reservoirs attached to every oscillator

#pragma once

namespace qtrans {

struct ReservoirParams {
    double gamma{0.0}; // emission rate per oscillator (1/s)
    double nbar{0.0};  // mean thermal photon number
};

// Throws DomainError for negative or non-finite entries.
void validate(const ReservoirParams& r);

} // namespace qtrans
