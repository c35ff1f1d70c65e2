#pragma once

namespace t2u {

inline constexpr const char* kToolName = "t2usim";
inline constexpr const char* kVersion = "1.0.0";

} // namespace t2u
