#pragma once

#define TEXTMILL_VERSION "0.1.0"

namespace textmill {
inline const char* version() { return TEXTMILL_VERSION; }
}  // namespace textmill
