#pragma once

#include <stdexcept>
#include <string>

namespace drfb {

// Exit-code contract used by the CLI: 0 ok, 1 config/validation,
// 2 infeasible/numerical, 3 divergence.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct infeasible_error : std::runtime_error {
    explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct divergence_error : std::runtime_error {
    explicit divergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const divergence_error*>(&e)) return 3;
    if (dynamic_cast<const infeasible_error*>(&e)) return 2;
    return 1;
}

} // namespace drfb
