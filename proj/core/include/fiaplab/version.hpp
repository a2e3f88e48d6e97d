#pragma once

namespace fiaplab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fiaplab
