#pragma once

namespace tvls {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tvls
