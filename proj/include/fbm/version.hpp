#pragma once

namespace fbm {
inline constexpr const char* kVersion = "0.1.0";
}
