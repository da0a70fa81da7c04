#pragma once

namespace ssp4 {

inline constexpr const char* code_version = "1.0.0";

}  // namespace ssp4
