// Exception types used across the workbench.
#ifndef ELLQ_ERRORS_HPP
#define ELLQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ellq {

// Bad configuration values (non-convergent eta, nonpositive tolerances, ...).
struct invalid_parameter_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A requested section space is empty (order < 0, or order 0 with shift off the lattice).
struct empty_space_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampling could not find admissible points / constraint systems stayed ill-conditioned.
struct degenerate_sample_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation hit a denominator below the pole guard; callers resample.
struct near_pole_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A variable required by evaluation is missing from the assignment.
struct context_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
    int line;
    int column;
    parse_error(const std::string& what, int line_, int col_)
        : std::runtime_error(what + " (line " + std::to_string(line_) + ", column " +
                             std::to_string(col_) + ")"),
          line(line_), column(col_) {}
};

// Normal-ordering exponent guard: keeps desk-scale computations desk-scale.
struct desk_scale_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ellq

#endif
