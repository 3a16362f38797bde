#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace precflex {

// Error taxonomy shared by all modules. Each type maps to one failure class
// named in the module contracts; the CLI maps them to exit codes.

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class BlowupError : public std::runtime_error {
public:
    BlowupError(std::int64_t step, const std::string& what)
        : std::runtime_error("numerical blowup at step " + std::to_string(step) + ": " + what),
          step_(step) {}

    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

namespace netbench {

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorrectnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace netbench
}  // namespace precflex
