#pragma once

#include <stdexcept>
#include <string>

namespace nonloc {

/// Failure category, used by the CLI to pick an exit code:
/// config/data/param map to exit 2 (usage), eval/solver map to exit 1 (runtime).
enum class ErrorKind {
    Config,  ///< malformed or inconsistent configuration
    Data,    ///< file parse / shape mismatch
    Param,   ///< out-of-range parameter (e.g. p <= 1 for the p-Laplacian)
    Eval,    ///< non-finite value produced during evaluation
    Solver   ///< iteration failure (inversion bracket blowup, etc.)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what_arg)
        : std::runtime_error(what_arg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_config(const std::string& msg) { throw Error(ErrorKind::Config, msg); }
[[noreturn]] inline void throw_data(const std::string& msg)   { throw Error(ErrorKind::Data, msg); }
[[noreturn]] inline void throw_param(const std::string& msg)  { throw Error(ErrorKind::Param, msg); }
[[noreturn]] inline void throw_eval(const std::string& msg)   { throw Error(ErrorKind::Eval, msg); }
[[noreturn]] inline void throw_solver(const std::string& msg) { throw Error(ErrorKind::Solver, msg); }

} // namespace nonloc
