#pragma once
#include <stdexcept>

namespace hrf {

// invalid field data or operation precondition (bad metric, bad weight, ...)
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// invalid experiment configuration; rejected before any work starts
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// iterative solver failed to reach its tolerance
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hrf
