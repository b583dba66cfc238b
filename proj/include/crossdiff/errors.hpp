#ifndef CROSSDIFF_ERRORS_HPP
#define CROSSDIFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crossdiff {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DivisionByZeroInterval : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct ParityMismatch : Error { using Error::Error; };
struct UnboundedSupport : Error { using Error::Error; };
struct WeightOrder : Error { using Error::Error; };
struct UnboundedTail : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct StallAtStep : Error { using Error::Error; };
struct EigensolverFailure : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace crossdiff

#endif
