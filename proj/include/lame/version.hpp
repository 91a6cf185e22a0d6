#pragma once

namespace lame {

inline constexpr const char* version = "0.1.0";

}
