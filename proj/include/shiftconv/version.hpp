#pragma once

namespace shiftconv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace shiftconv
