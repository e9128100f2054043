#pragma once

namespace unisplit {
inline constexpr const char* version = "0.1.0";
}
