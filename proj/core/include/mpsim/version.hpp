#pragma once

namespace mpsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mpsim
