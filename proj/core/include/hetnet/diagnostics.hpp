#pragma once

#include <functional>
#include <string_view>

namespace hetnet {

using WarningHandler = std::function<void(std::string_view)>;

/// Routes a non-fatal numerical warning (clamping, truncation) to the
/// installed handler; the default handler writes to stderr.
void emit_warning(std::string_view message);

/// Installs `handler` and returns the previous one. Pass an empty function to
/// restore the default.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace hetnet
