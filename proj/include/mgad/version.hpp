#pragma once

namespace mgad {
inline constexpr const char* kVersion = "0.1.0";
}
