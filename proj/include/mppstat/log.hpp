#pragma once

#include <functional>
#include <string>

namespace mppstat {

/// Non-fatal diagnostics. Goes to stderr unless a sink is installed.
void warn(const std::string& message);

using WarningSink = std::function<void(const std::string&)>;

/// Returns the previous sink. Pass an empty function to restore stderr.
WarningSink set_warning_sink(WarningSink sink);

} // namespace mppstat
