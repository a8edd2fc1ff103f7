#pragma once

namespace patchpot {
inline constexpr const char* kVersion = "0.1.0";
}
