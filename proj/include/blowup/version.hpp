#pragma once

namespace blowup {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace blowup
