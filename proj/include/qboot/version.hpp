#pragma once

namespace qboot {

inline constexpr const char* kVersion = "0.1.0";

}
