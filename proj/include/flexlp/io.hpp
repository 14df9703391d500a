#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flexlp/flock.hpp"
#include "flexlp/stepper.hpp"

namespace flexlp::io {

inline constexpr int kSceneVersion = 1;
inline constexpr int kTraceVersion = 1;

struct SceneFile {
  Scene scene;
  std::optional<FlockSpec> flock;
  std::vector<std::string> warnings;  // e.g. clockwise loops that were reversed
};

/// Parses and validates a JSON scene (angles in radians). Throws InputError
/// for syntax, schema, and polygon problems, PenetrationError when bodies
/// start overlapping.
SceneFile parse_scene(const std::string& text);
SceneFile load_scene(const std::filesystem::path& path);

std::string serialize_scene(const Scene& scene, const std::optional<FlockSpec>& flock = std::nullopt);

struct TraceInfo {
  std::string command;
  Objective objective;
  StepParams params;
};

/// Self-contained JSON record of a run; timing lives under "timing" only.
std::string serialize_trace(const Scene& initial, const StepTrace& trace, const TraceInfo& info,
                            const std::optional<FlockSpec>& flock = std::nullopt);

/// Initial configuration as red outlines over the final one in gray.
std::string svg_document(const Scene& before, const Scene& after);
void render_svg(const Scene& before, const Scene& after, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace flexlp::io
