#pragma once

namespace pinchlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pinchlab
