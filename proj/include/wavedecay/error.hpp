#pragma once

#include <stdexcept>
#include <string>

namespace wavedecay {

/// Runtime failure inside a numerical operation (bad coefficients, blow-up,
/// domain coverage, ...). Messages carry the offending quantity or grid point.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Config/schema violation. The CLI maps this to exit code 2, everything
/// else to exit code 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace wavedecay
