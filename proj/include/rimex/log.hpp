#pragma once

#include <functional>
#include <string_view>

namespace rimex {

using WarningSink = std::function<void(std::string_view)>;

/// Replace the warning sink (default: stderr). Passing an empty function
/// silences warnings. Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void log_warning(std::string_view message);

}  // namespace rimex
