#pragma once

namespace dspec {

inline constexpr const char* toolkit_version = "0.1.0";

}
