#pragma once

#include <stdexcept>
#include <string>

namespace pmsim {

// a requested grid or detector window cannot contain the state
struct domain_coverage_error : std::runtime_error {
    explicit domain_coverage_error(const std::string& msg) : std::runtime_error(msg) {}
};

// a quantity is undefined or underflowed: zero survival, zero coupling, ...
struct numeric_range_error : std::runtime_error {
    explicit numeric_range_error(const std::string& msg) : std::runtime_error(msg) {}
};

// an estimator was handed too few counts to produce a value
struct insufficient_counts_error : std::runtime_error {
    explicit insufficient_counts_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace pmsim
