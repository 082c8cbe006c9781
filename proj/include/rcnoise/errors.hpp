// errors.hpp - Exception types shared across the library
#pragma once

#include <stdexcept>
#include <string>

namespace rcnoise {

// Bad argument shapes, out-of-range parameters, malformed input files.
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input violates a structural assumption (non-dephasing unitary, affine
// transfer matrix, broken invariant on a derived quantity).
class structural_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Coherence too small to synthesize fields (r below cutoff, beta diverges).
class singularity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature or iteration failed to converge.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A model produced an unphysical state (e.g. positivity loss after
// element-wise damping).
class model_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rcnoise
