#ifndef HDTORUS_ERRORS_HPP
#define HDTORUS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hdtorus {

// Error categories map to CLI exit codes: config=2, domain=3, size=4,
// singularity=5.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SizeError : std::runtime_error {
    explicit SizeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularityError : std::runtime_error {
    explicit SingularityError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hdtorus

#endif
