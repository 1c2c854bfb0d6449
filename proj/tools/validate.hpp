// validate.hpp — oracle-equivalence suite behind `qt validate`

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qtrans::cli {

struct ValidationCheck {
    std::string check;
    std::string config;
    double max_error{0.0};
    double tolerance{0.0};
    bool pass{false};
};

// Every analytic route against its brute-force counterpart on seeded random inputs.
std::vector<ValidationCheck> run_validation(std::uint64_t seed = 20240601);

} // namespace qtrans::cli
