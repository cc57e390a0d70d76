#pragma once

#include <stdexcept>

namespace freewalk {

/// A computation would exceed a configured size budget.
class resource_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A construction produced a value that should be impossible (degenerate norm,
/// non-scalar where scalar is guaranteed).
class numerical_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A Monte-Carlo estimate has no usable samples.
class estimation_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace freewalk
