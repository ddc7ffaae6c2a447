#pragma once

namespace cdsolve {
inline constexpr const char* kVersion = "0.1.0";
}
