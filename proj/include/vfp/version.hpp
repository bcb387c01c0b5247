#pragma once

namespace vfp {
inline constexpr const char* kVersion = "0.1.0";
}
