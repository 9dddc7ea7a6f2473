#pragma once

namespace rom {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rom
