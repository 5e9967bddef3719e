#pragma once

namespace canyon {

inline constexpr const char* kVersion = "0.1.0";

}
