#pragma once

#include <functional>
#include <string>

namespace ctwindow {

using WarningSink = std::function<void(const std::string&)>;

/// Emit a warning. Goes to stderr unless a sink is installed.
void warn(const std::string& message);

/// Replace the warning sink; returns the previous one. An empty sink restores stderr.
WarningSink set_warning_sink(WarningSink sink);

} // namespace ctwindow
