#pragma once

namespace loewner {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace loewner
