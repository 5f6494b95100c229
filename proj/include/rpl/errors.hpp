#pragma once

#include <stdexcept>
#include <string>

namespace rpl {

// Precondition or configuration violation. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Geometric configuration on which the requested quantity is undefined
// (e.g. the tangency direction when the radii coincide).
class DegenerateConfiguration : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// File system / parsing failure. The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rpl
