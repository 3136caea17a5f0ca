#pragma once

#include <stdexcept>
#include <string>

namespace qcons {

// Base for every error the engine raises. Callers that only care about
// "something went wrong in the physics layer" can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define QCONS_DEFINE_ERROR(Name)                 \
    class Name : public Error {                  \
    public:                                      \
        using Error::Error;                      \
    }

QCONS_DEFINE_ERROR(DomainError);
QCONS_DEFINE_ERROR(DimensionError);
QCONS_DEFINE_ERROR(DegenerateSpectrum);
QCONS_DEFINE_ERROR(PhaseUndefined);
QCONS_DEFINE_ERROR(SingularOmega);
QCONS_DEFINE_ERROR(GradientMismatch);
QCONS_DEFINE_ERROR(ChartSingularity);
QCONS_DEFINE_ERROR(ProjectionFailed);
QCONS_DEFINE_ERROR(DriftExceeded);
QCONS_DEFINE_ERROR(PoleSingularity);

#undef QCONS_DEFINE_ERROR

}  // namespace qcons
