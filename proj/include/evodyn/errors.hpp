#ifndef EVODYN_ERRORS_HPP
#define EVODYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace evodyn {

// Bad arguments or malformed config. CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values, integration blowup, failed numeric cross-checks. Exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested certificate cannot apply to the given system (structural). Exit code 4.
struct CertificationError : std::runtime_error {
  explicit CertificationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Evaluation outside an operation's domain (e.g. relative entropy at the
// simplex boundary). Exit code 4 when it reaches the CLI.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace evodyn

#endif
