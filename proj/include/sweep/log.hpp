#pragma once

#include <functional>
#include <string>

namespace sweep {

using WarningSink = std::function<void(const std::string&)>;

/// Reports a recoverable condition; stderr by default.
void warn(const std::string& message);
/// Replaces the sink and returns the previous one. An empty sink silences.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace sweep
