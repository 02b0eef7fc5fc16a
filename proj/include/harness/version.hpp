#pragma once

namespace harness {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace harness
