#ifndef MLAB_ERRORS_HPP
#define MLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mlab {

/// Base class of all library errors.  name() is the stable identifier used
/// in machine-readable reports; what() carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& msg)
        : std::runtime_error(name + ": " + msg), name_(std::move(name)) {}
    const std::string& name() const { return name_; }
private:
    std::string name_;
};

#define MLAB_DEFINE_ERROR(Name)                                     \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& msg) : Error(#Name, msg) {} \
    }

MLAB_DEFINE_ERROR(ZeroResolutionError);
MLAB_DEFINE_ERROR(RegularizationMismatch);
MLAB_DEFINE_ERROR(IntegratorFailure);
MLAB_DEFINE_ERROR(DegenerateStabilizer);
MLAB_DEFINE_ERROR(NotInvariant);
MLAB_DEFINE_ERROR(ZeroInvariant);
MLAB_DEFINE_ERROR(ParameterOutOfRange);
MLAB_DEFINE_ERROR(NotADiffeomorphism);
MLAB_DEFINE_ERROR(GridOverflow);
MLAB_DEFINE_ERROR(BoundaryClass);
MLAB_DEFINE_ERROR(ResonantOperator);
MLAB_DEFINE_ERROR(NonGenericOperator);
MLAB_DEFINE_ERROR(InconsistentInvariant);
MLAB_DEFINE_ERROR(LabelOutOfDomain);
MLAB_DEFINE_ERROR(BranchCut);
MLAB_DEFINE_ERROR(ConstraintViolation);
MLAB_DEFINE_ERROR(BoundaryLeak);
MLAB_DEFINE_ERROR(NotEigenlike);
MLAB_DEFINE_ERROR(MalformedSpec);

#undef MLAB_DEFINE_ERROR

} // namespace mlab

#endif
