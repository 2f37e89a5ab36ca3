#pragma once

#include <stdexcept>
#include <string>

namespace bhflow {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// state or radius outside the admissible set
struct domain_error : error {
    using error::error;
};

struct range_error : error {
    using error::error;
};

// conserved pair not in the image of the state map
struct inversion_error : error {
    using error::error;
};

struct config_error : error {
    using error::error;
};

// root finder or integrator failed to converge
struct numerical_error : error {
    using error::error;
};

// an operation was called on data it does not accept
struct misuse_error : error {
    using error::error;
};

} // namespace bhflow
