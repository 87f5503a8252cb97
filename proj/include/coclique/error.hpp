#pragma once

#include <stdexcept>
#include <string>

namespace coclique {

// Fatal pipeline error. The CLI maps these to a one-line `error: ...`
// message and exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

} // namespace coclique
