#pragma once

namespace cdand {
inline constexpr const char* kVersion = "0.1.0";
}
