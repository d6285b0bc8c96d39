#pragma once

#include <stdexcept>
#include <string>

namespace closurekb {

// Root of every error raised by the library. Each module derives its own
// named errors from this so callers can catch per-module or globally.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace closurekb
