#pragma once

#include <functional>
#include <string_view>

namespace llmcg {

using WarningSink = std::function<void(std::string_view)>;

// Process-wide sink for non-fatal warnings; defaults to stderr.
void warn(std::string_view message);

// Installs `sink` and returns the previous one. Passing nullptr restores stderr.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace llmcg
