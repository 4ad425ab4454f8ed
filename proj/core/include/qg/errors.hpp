#pragma once

#include <stdexcept>

namespace qg {

// Numerical failure as opposed to bad input: EM degeneracy, empty test
// bins, non-finite intermediate results. The CLI maps this to exit code 2
// while precondition violations (std::domain_error / std::invalid_argument)
// map to exit code 1.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qg
