#pragma once

#include <stdexcept>
#include <string>

namespace aspec {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ASPEC_DEFINE_ERROR(Name)                                                                   \
    class Name : public Error {                                                                    \
    public:                                                                                        \
        using Error::Error;                                                                        \
    }

ASPEC_DEFINE_ERROR(NonUnitary);
ASPEC_DEFINE_ERROR(DimensionMismatch);
ASPEC_DEFINE_ERROR(ConvergenceFailure);
ASPEC_DEFINE_ERROR(IncompleteClosure);
ASPEC_DEFINE_ERROR(ClosureRefused);
ASPEC_DEFINE_ERROR(ZeroSpectralRadius);
ASPEC_DEFINE_ERROR(DeterminantNotOne);
ASPEC_DEFINE_ERROR(InvalidParams);
ASPEC_DEFINE_ERROR(PrimeMismatch);
ASPEC_DEFINE_ERROR(FormatError);

#undef ASPEC_DEFINE_ERROR

} // namespace aspec
