#pragma once

namespace ergoscope {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ergoscope
