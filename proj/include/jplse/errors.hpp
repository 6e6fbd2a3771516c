#pragma once

#include <stdexcept>
#include <string>

namespace jplse {

// Validation failure on user-facing input. The CLI maps this to exit code 2,
// anything else escaping to exit code 1.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace jplse
