#pragma once

#include <stdexcept>
#include <string>

namespace treent {

// Domain errors (bad laws, infeasible inputs, caps exceeded). The CLI maps
// these to exit code 1 with a machine readable record.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

}  // namespace treent
