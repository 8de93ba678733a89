#pragma once

namespace fovstream {

inline constexpr const char* kVersion = "1.0.0";

// Bitstream container format revision. Bumped on any layout change;
// stable within a major release.
inline constexpr const char* kBitstreamMagic = "FVB1";

inline constexpr const char* version_string() {
    return "fovstream 1.0.0 (bitstream FVB1)";
}

}  // namespace fovstream
