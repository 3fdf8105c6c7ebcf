#pragma once

namespace fanolines {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "fanolines/1";

}  // namespace fanolines
