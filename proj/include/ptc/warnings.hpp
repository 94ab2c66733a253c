// warnings.hpp: non-fatal diagnostic channel (truncation warnings etc.).

#pragma once

#include <functional>
#include <string>

namespace ptc {

using WarnHandler = std::function<void(const std::string&)>;

// Replaces the process-wide warning sink; returns the previous handler.
// Default sink writes "warning: ..." to stderr.  Not thread safe; install
// handlers before spawning workers.
WarnHandler set_warn_handler(WarnHandler handler);

void warn(const std::string& message);

} // namespace ptc
