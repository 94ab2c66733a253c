#include "ptc/warnings.hpp"

#include <cstdio>
#include <utility>

namespace ptc {
namespace {

WarnHandler g_handler = [](const std::string& message) {
    std::fprintf(stderr, "warning: %s\n", message.c_str());
};

} // namespace

WarnHandler set_warn_handler(WarnHandler handler) {
    return std::exchange(g_handler, std::move(handler));
}

void warn(const std::string& message) {
    if (g_handler)
        g_handler(message);
}

} // namespace ptc
