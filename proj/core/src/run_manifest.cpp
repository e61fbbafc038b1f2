#include "textmill/run_manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "textmill/error.hpp"

namespace textmill {

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  nlohmann::ordered_json jc = nlohmann::ordered_json::object();
  for (const auto& [k, v] : counts) jc[k] = v;
  j["counts"] = std::move(jc);
  j["wall_time_s"] = wall_time_s;
  j["tool_version"] = tool_version;
  return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::uint64_t>();
  m.inputs = j.value("inputs", std::vector<std::string>{});
  m.outputs = j.value("outputs", std::vector<std::string>{});
  if (j.contains("counts")) {
    for (auto it = j["counts"].begin(); it != j["counts"].end(); ++it) {
      m.counts[it.key()] = it.value().get<std::int64_t>();
    }
  }
  m.wall_time_s = j.value("wall_time_s", 0.0);
  m.tool_version = j.value("tool_version", "");
  return m;
}

void save_run_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out.is_open()) throw IoError("cannot write run manifest: " + path);
  out << m.to_json() << "\n";
}

RunManifest load_run_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw IoError("cannot open run manifest: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return RunManifest::from_json(os.str());
}

}  // namespace textmill
