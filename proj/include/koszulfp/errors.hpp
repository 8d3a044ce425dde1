#pragma once
#include <stdexcept>
#include <string>

namespace koszul {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input shape problems: wrong sizes, mismatched fields, malformed vectors.
struct dimension_mismatch : error {
    using error::error;
};
struct field_mismatch : error {
    using error::error;
};

// small ⊄ big (or a claimed submodule is not one).
struct containment_violation : error {
    using error::error;
};

// A degree-k computation would exceed the configured memory budget.
struct budget_exceeded : error {
    using error::error;
};

// Requested internal degree is not certified by the truncation of the inputs.
struct truncation_insufficient : error {
    using error::error;
};

struct not_degree_one_generated : error {
    using error::error;
};
struct lowest_degree_nonzero : error {
    using error::error;
};
struct algebra_not_symmetric : error {
    using error::error;
};
struct odd_demushkin_rank : error {
    using error::error;
};
struct input_not_monomorphism : error {
    using error::error;
};

}  // namespace koszul
