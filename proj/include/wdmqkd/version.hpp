#pragma once

namespace wdmqkd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wdmqkd
