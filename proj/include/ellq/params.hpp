// Global numeric configuration shared by every module.
#ifndef ELLQ_PARAMS_HPP
#define ELLQ_PARAMS_HPP

#include "ellq/errors.hpp"
#include "ellq/numeric.hpp"

namespace ellq {

// Lattice parameter, quantization parameter and the numeric knobs that every
// residual check reads. Values are immutable after construction by convention.
struct EllipticParams {
    cplx eta{0.31, 1.07};
    cplx tau{0.173, 0.219};
    double series_eps = 1e-15;
    int sample_count = 40;
    double tol = 1e-7;
    double pole_margin = 0.05;

    void validate() const {
        if (!(eta.imag() > 0.0))
            throw invalid_parameter_error("EllipticParams: Im(eta) must be positive");
        if (!(series_eps > 0.0))
            throw invalid_parameter_error("EllipticParams: series_eps must be positive");
        if (!(tol > 0.0))
            throw invalid_parameter_error("EllipticParams: tol must be positive");
        if (!(pole_margin > 0.0))
            throw invalid_parameter_error("EllipticParams: pole_margin must be positive");
        if (sample_count <= 0)
            throw invalid_parameter_error("EllipticParams: sample_count must be positive");
    }
};

} // namespace ellq

#endif
