#pragma once

#include <stdexcept>
#include <string>

namespace ompath {

/// Thrown when an operation's mathematical precondition fails on otherwise
/// well-formed inputs (e.g. a divergent small-jump moment on a mode that is
/// expected to carry a drift correction). Distinct from std::invalid_argument,
/// which is reserved for malformed inputs. The CLI maps the two to different
/// exit codes.
class precondition_error : public std::runtime_error {
public:
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ompath
