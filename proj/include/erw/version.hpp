#pragma once

namespace erw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace erw
