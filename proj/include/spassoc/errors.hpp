#ifndef SPASSOC_ERRORS_HPP
#define SPASSOC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spassoc {

/// Malformed or inconsistent input (files, shapes, flags). CLI exit code 2.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerically degenerate problem (constant variable, nonpositive effective
/// variance, singular covariance, ...). CLI exit code 3.
class degeneracy_error : public std::runtime_error {
public:
    explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace spassoc

#endif // SPASSOC_ERRORS_HPP
