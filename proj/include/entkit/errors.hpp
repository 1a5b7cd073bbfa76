#ifndef ENTKIT_ERRORS_HPP
#define ENTKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace entkit {

// Bad user input: malformed configs, out-of-range parameters, schema
// violations.  The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical validity failure: unphysical state, cutoff overflow, singular
// linear system, eigensolver breakdown.  The CLI maps this to exit code 3.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace entkit

#endif
