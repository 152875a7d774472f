#pragma once

#include <stdexcept>
#include <string>

namespace lorasim {

/// Invalid user-supplied configuration (scenario file, grid, device list or
/// geometry). Carries a diagnostic naming the offending key or bound.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace lorasim
