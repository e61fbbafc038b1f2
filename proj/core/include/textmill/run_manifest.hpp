#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace textmill {

// Written next to every stage's outputs: what ran, with which resolved
// config, over which files, and the headline counts.
struct RunManifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, std::int64_t> counts;
  double wall_time_s = 0.0;
  std::string tool_version;

  std::string to_json() const;
  static RunManifest from_json(const std::string& json_text);
};

void save_run_manifest(const RunManifest& m, const std::string& path);
RunManifest load_run_manifest(const std::string& path);

}  // namespace textmill
