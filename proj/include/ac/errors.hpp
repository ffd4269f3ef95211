#pragma once

#include <stdexcept>
#include <string>

namespace ac {

// Error categories, aligned with the CLI exit codes:
//   config   -> 2 (bad parameters / violated preconditions)
//   numeric  -> 3 (solver did not converge, tolerance not met)
//   geometry -> 4 (domain construction impossible)
//   validity -> 4 (Fermi chart queried outside its validity region)
//   fit      -> 4 (ill-conditioned asymptotic fit)
enum class ErrKind { config, numeric, geometry, validity, fit };

class Error : public std::runtime_error {
public:
    Error(ErrKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    ErrKind kind;
};

inline int exit_code_for(ErrKind k) {
    switch (k) {
        case ErrKind::config: return 2;
        case ErrKind::numeric: return 3;
        default: return 4;
    }
}

} // namespace ac
