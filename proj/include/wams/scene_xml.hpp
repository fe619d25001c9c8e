#pragma once

#include "wams/sim.hpp"

#include <iosfwd>
#include <string>

namespace wams {

/// Scene-file serialization so downstream stages never re-parse raw map data.
/// Schema documented in docs/file-formats.md. Coordinates are written with
/// micrometer precision; the file is the canonical geometry from then on.
void write_scene_xml(std::ostream& os, const CityScene& scene,
                     const std::string& config_hash = "");

/// Inverse of write_scene_xml. Throws std::runtime_error with a line number on
/// malformed input. Path components are relabeled after load.
CityScene parse_scene_xml(const std::string& text, std::string* config_hash = nullptr);

} // namespace wams
