#ifndef XVA_ERRORS_HPP
#define XVA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace xva {

// Exit-code mapping used by the CLI: config/parse/argument -> 2,
// numerical non-convergence/estimation -> 3, I/O -> 4.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct ParseError : ConfigError {
    ParseError(const std::string& file, long line, const std::string& msg)
        : ConfigError(file + ":" + std::to_string(line) + ": " + msg), line_number(line) {}
    long line_number;
};

struct StateError : std::logic_error {
    explicit StateError(const std::string& msg) : std::logic_error(msg) {}
};

struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& msg, double last_residual)
        : std::runtime_error(msg + " (residual " + std::to_string(last_residual) + ")"),
          residual(last_residual) {}
    double residual;
};

struct EstimationError : std::runtime_error {
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace xva

#endif
