#pragma once

#include <stdexcept>
#include <string>

namespace curvlab {

// Base of every error raised by the library. `kind()` is the stable tag that
// lands in CLI error records.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define CURVLAB_ERROR_TYPE(Name, tag)                                   \
    class Name : public Error {                                         \
    public:                                                             \
        explicit Name(const std::string& what) : Error(tag, what) {}    \
    }

CURVLAB_ERROR_TYPE(DomainError, "domain");
CURVLAB_ERROR_TYPE(ConfigurationError, "configuration");
CURVLAB_ERROR_TYPE(ValidationError, "validation");
CURVLAB_ERROR_TYPE(NumericalError, "numerical");
CURVLAB_ERROR_TYPE(ConsistencyError, "internal_consistency");
CURVLAB_ERROR_TYPE(UnsupportedError, "unsupported");
CURVLAB_ERROR_TYPE(PreconditionError, "precondition");

#undef CURVLAB_ERROR_TYPE

}  // namespace curvlab
