#pragma once

#include <functional>
#include <string_view>

namespace olab {

using WarningSink = std::function<void(std::string_view)>;

/// Emits a warning through the current sink (stderr by default).
void warn(std::string_view message);

/// Replaces the warning sink; returns the previous one. Empty restores stderr.
WarningSink setWarningSink(WarningSink sink);

}  // namespace olab
