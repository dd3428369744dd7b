#pragma once

namespace neuroacc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace neuroacc
