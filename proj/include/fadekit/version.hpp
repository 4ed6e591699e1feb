#pragma once

namespace fadekit {

inline constexpr const char* version = "0.1.0";

}  // namespace fadekit
